#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nerleak/rng.hpp"
#include "nerleak/subword.hpp"

namespace nerleak::vocab {

using StringId = std::uint32_t;

/// Returned for a string that is absent from a frozen vocabulary.
inline constexpr StringId kUnknownId = 0xFFFFFFFFu;

enum class CostMode { simulated, wall_clock };

/// Per-lookup cost behavior. In simulated mode costs are deterministic
/// unit values (plus optional seeded Gaussian noise); in wall_clock mode
/// the cost of a lookup is its measured monotonic elapsed time in
/// nanoseconds.
struct CostModel {
    CostMode mode = CostMode::simulated;
    double hit_cost = 1.0;
    double miss_cost = 10.0;
    double residual_miss_cost = 0.0;
    std::uint64_t noise_seed = 0;
    double noise_scale = 0.0;
};

struct VocabStats {
    std::uint64_t lookups = 0;
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t inserts = 0;
};

struct InternResult {
    StringId id = kUnknownId;
    bool was_present = false;
    double cost = 0.0;
};

struct FeatureLookup {
    std::array<StringId, 4> ids{kUnknownId, kUnknownId, kUnknownId, kUnknownId};
    int miss_count = 0;
    double total_cost = 0.0;
};

/// Interning string table with hit/miss accounting and a freeze switch.
/// Ids are assigned in insertion order and never reused. Single-writer:
/// mutating calls must be externally serialized.
class Vocabulary {
public:
    Vocabulary() : noise_(0) {}
    explicit Vocabulary(const CostModel& cm) : noise_(0) { set_cost_model(cm); }

    /// Look up s, inserting it on a miss unless frozen. was_present reflects
    /// the pre-call state; a frozen miss returns kUnknownId.
    InternResult intern(std::string_view s);

    /// Interns (or frozen-looks-up) prefix, suffix, shape, norm in that
    /// fixed order.
    FeatureLookup lookup_features(const subword::SubwordFeatures& f);

    /// Membership probe with no side effects, not even stat changes.
    bool contains(std::string_view s) const;

    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }

    std::size_t size() const { return strings_.size(); }
    const VocabStats& stats() const { return stats_; }
    const CostModel& cost_model() const { return cost_model_; }
    void set_cost_model(const CostModel& cm);

    /// Interned strings in id order.
    const std::vector<std::string>& snapshot() const { return strings_; }

    /// Newline-delimited format, one string per line in id order, preceded
    /// by the header line `nerleak-vocab v1 count=<N> frozen=<0|1>`.
    /// Interned strings are feature strings of whitespace-free tokens, so
    /// the line-oriented format is lossless.
    void save(std::ostream& out) const;
    static Vocabulary load(std::istream& in);
    void save_file(const std::string& path) const;
    static Vocabulary load_file(const std::string& path);

private:
    double noisy(double base);

    std::unordered_map<std::string, StringId> index_;
    std::vector<std::string> strings_;
    // ids of strings inserted at query time whose first re-query still
    // carries residual_miss_cost
    std::vector<bool> residual_pending_;
    bool frozen_ = false;
    VocabStats stats_;
    CostModel cost_model_;
    Rng noise_;
};

}  // namespace nerleak::vocab
