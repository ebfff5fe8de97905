#include "nerleak/vocab.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nerleak::vocab {

double Vocabulary::noisy(double base) {
    if (cost_model_.noise_scale <= 0.0) return base;
    const double c = base + cost_model_.noise_scale * noise_.normal();
    return c < 0.0 ? 0.0 : c;
}

void Vocabulary::set_cost_model(const CostModel& cm) {
    if (cm.mode == CostMode::simulated && cm.miss_cost < cm.hit_cost)
        throw std::invalid_argument("CostModel: simulated mode requires miss_cost >= hit_cost");
    if (cm.hit_cost < 0.0)
        throw std::invalid_argument("CostModel: hit_cost must be >= 0");
    cost_model_ = cm;
    noise_ = Rng(cm.noise_seed);
}

InternResult Vocabulary::intern(std::string_view s) {
    if (cost_model_.mode == CostMode::wall_clock) {
        const auto t0 = std::chrono::steady_clock::now();
        InternResult r;
        const auto it = index_.find(std::string(s));
        ++stats_.lookups;
        if (it != index_.end()) {
            ++stats_.hits;
            r.id = it->second;
            r.was_present = true;
        } else {
            ++stats_.misses;
            if (!frozen_) {
                const StringId id = static_cast<StringId>(strings_.size());
                strings_.emplace_back(s);
                residual_pending_.push_back(false);
                index_.emplace(strings_.back(), id);
                ++stats_.inserts;
                r.id = id;
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        r.cost = static_cast<double>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
        return r;
    }

    InternResult r;
    ++stats_.lookups;
    const auto it = index_.find(std::string(s));
    if (it != index_.end()) {
        ++stats_.hits;
        r.id = it->second;
        r.was_present = true;
        double base = cost_model_.hit_cost;
        if (residual_pending_[r.id]) {
            base += cost_model_.residual_miss_cost;
            residual_pending_[r.id] = false;
        }
        r.cost = noisy(base);
        return r;
    }
    ++stats_.misses;
    r.cost = noisy(cost_model_.miss_cost);
    if (!frozen_) {
        const StringId id = static_cast<StringId>(strings_.size());
        strings_.emplace_back(s);
        residual_pending_.push_back(true);
        index_.emplace(strings_.back(), id);
        ++stats_.inserts;
        r.id = id;
    }
    return r;
}

FeatureLookup Vocabulary::lookup_features(const subword::SubwordFeatures& f) {
    FeatureLookup out;
    const std::string_view order[4] = {f.prefix, f.suffix, f.shape, f.norm};
    for (int i = 0; i < 4; ++i) {
        const InternResult r = intern(order[i]);
        out.ids[static_cast<std::size_t>(i)] = r.id;
        if (!r.was_present) ++out.miss_count;
        out.total_cost += r.cost;
    }
    return out;
}

bool Vocabulary::contains(std::string_view s) const {
    return index_.find(std::string(s)) != index_.end();
}

void Vocabulary::save(std::ostream& out) const {
    out << "nerleak-vocab v1 count=" << strings_.size() << " frozen=" << (frozen_ ? 1 : 0) << "\n";
    for (const auto& s : strings_) out << s << "\n";
}

Vocabulary Vocabulary::load(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("vocab load: empty stream");
    std::size_t count = 0;
    int frozen_flag = 0;
    {
        std::istringstream hs(header);
        std::string magic, version, count_kv, frozen_kv;
        hs >> magic >> version >> count_kv >> frozen_kv;
        if (magic != "nerleak-vocab" || version != "v1" || count_kv.rfind("count=", 0) != 0 ||
            frozen_kv.rfind("frozen=", 0) != 0)
            throw std::runtime_error("vocab load: bad header: " + header);
        count = static_cast<std::size_t>(std::stoull(count_kv.substr(6)));
        frozen_flag = std::stoi(frozen_kv.substr(7));
    }
    Vocabulary v;
    v.strings_.reserve(count);
    std::string line;
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line))
            throw std::runtime_error("vocab load: truncated file (expected " +
                                     std::to_string(count) + " strings, got " + std::to_string(i) + ")");
        v.strings_.push_back(line);
        v.residual_pending_.push_back(false);
        v.index_.emplace(v.strings_.back(), static_cast<StringId>(i));
    }
    v.frozen_ = frozen_flag != 0;
    return v;
}

void Vocabulary::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("vocab save: cannot open " + path);
    save(out);
}

Vocabulary Vocabulary::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("vocab load: cannot open " + path);
    return load(in);
}

}  // namespace nerleak::vocab
