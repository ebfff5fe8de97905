#include "nerleak/nermodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nerleak/hash.hpp"
#include "nerleak/rng.hpp"
#include "nerleak/utf8.hpp"

namespace nerleak::ner {

namespace {

bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r'; }

bool is_trailing_punct(char32_t c) {
    return c == U'.' || c == U',' || c == U';' || c == U':' || c == U'!' || c == U'?' ||
           c == U'\'' || c == U'"';
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    const auto cps = utf8::decode(text);
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_space(cps[i])) ++i;
        if (i >= cps.size()) break;
        std::size_t j = i;
        while (j < cps.size() && !is_space(cps[j])) ++j;
        // split one trailing punctuation character off pieces longer than 1
        if (j - i > 1 && is_trailing_punct(cps[j - 1])) {
            out.push_back({utf8::encode({cps.begin() + static_cast<std::ptrdiff_t>(i),
                                         cps.begin() + static_cast<std::ptrdiff_t>(j - 1)}),
                           i, j - 1});
            out.push_back({utf8::encode_one(cps[j - 1]), j - 1, j});
        } else {
            out.push_back({utf8::encode({cps.begin() + static_cast<std::ptrdiff_t>(i),
                                         cps.begin() + static_cast<std::ptrdiff_t>(j)}),
                           i, j});
        }
        i = j;
    }
    return out;
}

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw std::invalid_argument("LabelSet: need at least one label");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i].empty()) throw std::invalid_argument("LabelSet: empty label name");
        for (std::size_t j = i + 1; j < labels_.size(); ++j)
            if (labels_[i] == labels_[j])
                throw std::invalid_argument("LabelSet: duplicate label " + labels_[i]);
    }
}

std::size_t LabelSet::label_index(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label) return i;
    throw std::invalid_argument("unknown label '" + std::string(label) + "'");
}

std::string LabelSet::tag_name(std::size_t tag) const {
    if (tag == kTagO) return "O";
    const std::size_t label = (tag - 1) / 4;
    if (label >= labels_.size()) throw std::invalid_argument("tag index out of range");
    static const char* kKinds = "BILU";
    return std::string(1, kKinds[(tag - 1) % 4]) + "-" + labels_[label];
}

NerModel::NerModel(const ModelConfig& cfg, LabelSet labels, const vocab::CostModel& cm)
    : config_(cfg), labels_(std::move(labels)), vocab_(cm) {
    if (!cfg.embed_rows_per_feature || !cfg.embed_dim_per_feature || !cfg.encoder_depth ||
        !cfg.window || !cfg.hidden_dim)
        throw std::invalid_argument("ModelConfig: all dimensions must be positive");

    Rng rng(cfg.seed);
    auto init = [&rng](std::vector<float>& w, std::size_t n, double scale) {
        w.resize(n);
        for (auto& x : w) x = static_cast<float>((rng.unit() * 2.0 - 1.0) * scale);
    };

    const std::size_t d4 = 4 * cfg.embed_dim_per_feature;
    const std::size_t h = cfg.hidden_dim;
    const std::size_t k = 2 * cfg.window + 1;
    for (auto& table : embed_) init(table, cfg.embed_rows_per_feature * cfg.embed_dim_per_feature, 0.1);
    init(proj_w_, h * d4, std::sqrt(6.0 / static_cast<double>(d4 + h)));
    init(proj_b_, h, 0.0);
    enc_w_.resize(cfg.encoder_depth);
    enc_b_.resize(cfg.encoder_depth);
    for (std::size_t l = 0; l < cfg.encoder_depth; ++l) {
        init(enc_w_[l], h * k * h, std::sqrt(6.0 / static_cast<double>(k * h + h)));
        init(enc_b_[l], h, 0.0);
    }
    init(out_w_, labels_.tag_count() * h, std::sqrt(6.0 / static_cast<double>(h + labels_.tag_count())));
    init(out_b_, labels_.tag_count(), 0.0);
}

std::vector<double> NerModel::embed_token(const subword::SubwordFeatures& f) const {
    const std::size_t d = config_.embed_dim_per_feature;
    std::vector<double> e(4 * d);
    const std::string_view order[4] = {f.prefix, f.suffix, f.norm, f.shape};
    for (std::size_t t = 0; t < 4; ++t) {
        const std::size_t row =
            static_cast<std::size_t>(fnv1a64(order[t]) % config_.embed_rows_per_feature);
        const float* src = embed_[t].data() + row * d;
        for (std::size_t i = 0; i < d; ++i) e[t * d + i] = static_cast<double>(src[i]);
    }
    return e;
}

namespace {

// y = W x + b with W row-major (rows x cols)
void matvec(const std::vector<float>& w, const std::vector<float>& b, const double* x,
            std::size_t rows, std::size_t cols, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = static_cast<double>(b[r]);
        const float* wr = w.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) acc += static_cast<double>(wr[c]) * x[c];
        y[r] = acc;
    }
}

}  // namespace

std::vector<std::vector<double>> NerModel::encode(
    const std::vector<std::vector<double>>& embeddings) const {
    if (embeddings.empty()) return {};
    const std::size_t n = embeddings.size();
    const std::size_t h = config_.hidden_dim;
    const std::size_t w = config_.window;
    const std::size_t k = 2 * w + 1;
    const std::size_t d4 = 4 * config_.embed_dim_per_feature;

    std::vector<std::vector<double>> cur(n, std::vector<double>(h));
    for (std::size_t i = 0; i < n; ++i) {
        if (embeddings[i].size() != d4)
            throw std::invalid_argument("encode: embedding has wrong length");
        matvec(proj_w_, proj_b_, embeddings[i].data(), h, d4, cur[i].data());
    }
    std::vector<double> x(k * h);
    std::vector<std::vector<double>> next(n, std::vector<double>(h));
    for (std::size_t l = 0; l < config_.encoder_depth; ++l) {
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(x.begin(), x.end(), 0.0);
            for (std::size_t o = 0; o < k; ++o) {
                const std::ptrdiff_t j =
                    static_cast<std::ptrdiff_t>(i) + static_cast<std::ptrdiff_t>(o) -
                    static_cast<std::ptrdiff_t>(w);
                if (j >= 0 && j < static_cast<std::ptrdiff_t>(n))
                    std::copy(cur[static_cast<std::size_t>(j)].begin(),
                              cur[static_cast<std::size_t>(j)].end(), x.begin() + static_cast<std::ptrdiff_t>(o * h));
            }
            matvec(enc_w_[l], enc_b_[l], x.data(), h, k * h, next[i].data());
            for (auto& v : next[i]) v = v > 0.0 ? v : 0.0;
        }
        std::swap(cur, next);
    }
    return cur;
}

struct NerModel::Forward {
    std::vector<Token> tokens;
    std::vector<subword::SubwordFeatures> feats;
    std::vector<std::array<std::size_t, 4>> rows;  // table row per feature, SIZE_MAX = frozen out
    std::vector<std::vector<double>> embed;        // 4d per token
    std::vector<std::vector<std::vector<double>>> acts;  // [depth+1][token][hidden], pre-ReLU h0 is linear
    std::vector<std::vector<double>> pre;          // preactivations of the last layer pass (scratch)
    std::vector<std::vector<double>> probs;
    int miss_count = 0;
    double lookup_cost = 0.0;
};

NerModel::Forward NerModel::run_forward(const std::string& text) {
    Forward f;
    f.tokens = tokenize(text);
    const std::size_t n = f.tokens.size();
    const std::size_t d = config_.embed_dim_per_feature;
    const std::size_t h = config_.hidden_dim;
    const std::size_t w = config_.window;
    const std::size_t k = 2 * w + 1;
    const std::size_t tags = labels_.tag_count();

    f.feats.reserve(n);
    f.rows.reserve(n);
    f.embed.reserve(n);
    for (const auto& tok : f.tokens) {
        auto feat = subword::features(tok.text);
        const auto lookup = vocab_.lookup_features(feat);
        f.miss_count += lookup.miss_count;
        f.lookup_cost += lookup.total_cost;

        // lookup order is (prefix, suffix, shape, norm); embeddings
        // concatenate as prefix | suffix | norm | shape
        const std::string_view strs[4] = {feat.prefix, feat.suffix, feat.norm, feat.shape};
        const vocab::StringId ids[4] = {lookup.ids[0], lookup.ids[1], lookup.ids[3], lookup.ids[2]};
        std::array<std::size_t, 4> rows{};
        std::vector<double> e(4 * d);
        for (std::size_t t = 0; t < 4; ++t) {
            // a frozen-out feature maps to the reserved row 0
            const std::size_t row =
                ids[t] == vocab::kUnknownId
                    ? 0
                    : static_cast<std::size_t>(fnv1a64(strs[t]) % config_.embed_rows_per_feature);
            rows[t] = row;
            const float* src = embed_[t].data() + row * d;
            for (std::size_t i = 0; i < d; ++i) e[t * d + i] = static_cast<double>(src[i]);
        }
        f.rows.push_back(rows);
        f.embed.push_back(std::move(e));
        f.feats.push_back(std::move(feat));
    }
    if (n == 0) return f;

    // activations per layer; acts[0] is the linear projection output
    f.acts.assign(config_.encoder_depth + 1, {});
    f.acts[0].assign(n, std::vector<double>(h));
    for (std::size_t i = 0; i < n; ++i)
        matvec(proj_w_, proj_b_, f.embed[i].data(), h, 4 * d, f.acts[0][i].data());

    std::vector<double> x(k * h);
    for (std::size_t l = 0; l < config_.encoder_depth; ++l) {
        f.acts[l + 1].assign(n, std::vector<double>(h));
        for (std::size_t i = 0; i < n; ++i) {
            std::fill(x.begin(), x.end(), 0.0);
            for (std::size_t o = 0; o < k; ++o) {
                const std::ptrdiff_t j =
                    static_cast<std::ptrdiff_t>(i + o) - static_cast<std::ptrdiff_t>(w);
                if (j >= 0 && j < static_cast<std::ptrdiff_t>(n))
                    std::copy(f.acts[l][static_cast<std::size_t>(j)].begin(),
                              f.acts[l][static_cast<std::size_t>(j)].end(),
                              x.begin() + static_cast<std::ptrdiff_t>(o * h));
            }
            matvec(enc_w_[l], enc_b_[l], x.data(), h, k * h, f.acts[l + 1][i].data());
            for (auto& v : f.acts[l + 1][i]) v = v > 0.0 ? v : 0.0;
        }
    }

    f.probs.assign(n, std::vector<double>(tags));
    std::vector<double> logits(tags);
    for (std::size_t i = 0; i < n; ++i) {
        matvec(out_w_, out_b_, f.acts[config_.encoder_depth][i].data(), tags, h, logits.data());
        const double mx = *std::max_element(logits.begin(), logits.end());
        double z = 0.0;
        for (std::size_t t = 0; t < tags; ++t) {
            f.probs[i][t] = std::exp(logits[t] - mx);
            z += f.probs[i][t];
        }
        for (auto& p : f.probs[i]) p /= z;
    }
    return f;
}

QueryResult NerModel::predict(const std::string& text) {
    Forward f = run_forward(text);
    QueryResult out;
    out.tokens = f.tokens;
    out.tag_distributions = f.probs;
    out.miss_count = f.miss_count;
    out.lookup_cost = f.lookup_cost;

    const std::size_t n = f.tokens.size();
    std::vector<std::size_t> raw(n);
    for (std::size_t i = 0; i < n; ++i)
        raw[i] = static_cast<std::size_t>(
            std::max_element(f.probs[i].begin(), f.probs[i].end()) - f.probs[i].begin());

    // greedy repair: I/L without a matching open B is demoted to O;
    // entities left open never emit
    std::ptrdiff_t open_label = -1;
    std::size_t open_start = 0;
    auto emit = [&](std::size_t first_tok, std::size_t last_tok, std::size_t label) {
        double log_sum = 0.0;
        for (std::size_t i = first_tok; i <= last_tok; ++i) {
            std::size_t tag;
            if (first_tok == last_tok)
                tag = labels_.tag_u(label);
            else if (i == first_tok)
                tag = labels_.tag_b(label);
            else if (i == last_tok)
                tag = labels_.tag_l(label);
            else
                tag = labels_.tag_i(label);
            log_sum += std::log(f.probs[i][tag]);
        }
        const double score =
            std::exp(log_sum / static_cast<double>(last_tok - first_tok + 1));
        out.entities.push_back({f.tokens[first_tok].start, f.tokens[last_tok].end,
                                labels_.labels()[label], score});
    };
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = raw[i];
        if (t == LabelSet::kTagO) {
            open_label = -1;
            continue;
        }
        const std::size_t label = (t - 1) / 4;
        switch ((t - 1) % 4) {
            case 0:  // B
                open_label = static_cast<std::ptrdiff_t>(label);
                open_start = i;
                break;
            case 1:  // I
                if (open_label != static_cast<std::ptrdiff_t>(label)) open_label = -1;
                break;
            case 2:  // L
                if (open_label == static_cast<std::ptrdiff_t>(label)) emit(open_start, i, label);
                open_label = -1;
                break;
            case 3:  // U
                emit(i, i, label);
                open_label = -1;
                break;
        }
    }
    return out;
}

std::pair<std::size_t, std::size_t> NerModel::align_span(const std::vector<Token>& tokens,
                                                         std::size_t start, std::size_t end) const {
    std::size_t first = tokens.size(), last = tokens.size();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].start == start) first = i;
        if (tokens[i].end == end) last = i;
    }
    if (first == tokens.size() || last == tokens.size() || last < first)
        throw std::invalid_argument("span (" + std::to_string(start) + ", " + std::to_string(end) +
                                    ") does not align to token boundaries");
    return {first, last};
}

double NerModel::score_span(const std::string& text, std::size_t start, std::size_t end,
                            const std::string& label) {
    const std::size_t label_idx = labels_.label_index(label);
    Forward f = run_forward(text);
    const auto [first, last] = align_span(f.tokens, start, end);
    double log_sum = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
        std::size_t tag;
        if (first == last)
            tag = labels_.tag_u(label_idx);
        else if (i == first)
            tag = labels_.tag_b(label_idx);
        else if (i == last)
            tag = labels_.tag_l(label_idx);
        else
            tag = labels_.tag_i(label_idx);
        log_sum += std::log(f.probs[i][tag]);
    }
    return std::exp(log_sum / static_cast<double>(last - first + 1));
}

std::vector<std::size_t> NerModel::gold_tags(const corpus::AnnotatedDocument& doc,
                                             const std::vector<Token>& tokens) const {
    std::vector<std::size_t> tags(tokens.size(), LabelSet::kTagO);
    for (const auto& span : doc.entities) {
        const std::size_t label = labels_.label_index(span.label);
        const auto [first, last] = align_span(tokens, span.start, span.end);
        if (first == last) {
            tags[first] = labels_.tag_u(label);
        } else {
            tags[first] = labels_.tag_b(label);
            for (std::size_t i = first + 1; i < last; ++i) tags[i] = labels_.tag_i(label);
            tags[last] = labels_.tag_l(label);
        }
    }
    return tags;
}

std::vector<TensorView> NerModel::tensors() {
    std::vector<TensorView> v;
    static const char* kFeat[4] = {"prefix", "suffix", "norm", "shape"};
    for (std::size_t t = 0; t < 4; ++t)
        v.push_back({std::string("embed.") + kFeat[t], embed_[t].data(), embed_[t].size()});
    v.push_back({"proj.w", proj_w_.data(), proj_w_.size()});
    v.push_back({"proj.b", proj_b_.data(), proj_b_.size()});
    for (std::size_t l = 0; l < config_.encoder_depth; ++l) {
        v.push_back({"enc" + std::to_string(l) + ".w", enc_w_[l].data(), enc_w_[l].size()});
        v.push_back({"enc" + std::to_string(l) + ".b", enc_b_[l].data(), enc_b_[l].size()});
    }
    v.push_back({"out.w", out_w_.data(), out_w_.size()});
    v.push_back({"out.b", out_b_.data(), out_b_.size()});
    return v;
}

// Runs forward+backward over docs. When grads is non-null it must be sized
// like tensors(); gradients and the returned loss are both averaged over
// the total token count.
double NerModel::accumulate(const corpus::Corpus& docs, std::vector<std::vector<double>>* grads) {
    const std::size_t d = config_.embed_dim_per_feature;
    const std::size_t d4 = 4 * d;
    const std::size_t h = config_.hidden_dim;
    const std::size_t w = config_.window;
    const std::size_t k = 2 * w + 1;
    const std::size_t depth = config_.encoder_depth;
    const std::size_t tags = labels_.tag_count();

    double loss_sum = 0.0;
    std::size_t token_count = 0;

    // gradient slot indices in tensors() order
    const std::size_t gi_proj_w = 4, gi_proj_b = 5;
    const std::size_t gi_out_w = 6 + 2 * depth, gi_out_b = 7 + 2 * depth;

    std::vector<double> x(k * h), dx(k * h), da(h), dlogit(tags);
    for (const auto& doc : docs) {
        Forward f = run_forward(doc.text);
        const auto gold = gold_tags(doc, f.tokens);
        const std::size_t n = f.tokens.size();
        token_count += n;
        for (std::size_t i = 0; i < n; ++i) loss_sum += -std::log(f.probs[i][gold[i]]);
        if (!grads || n == 0) continue;

        auto& g = *grads;
        std::vector<std::vector<double>> dh(n, std::vector<double>(h, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < tags; ++t)
                dlogit[t] = f.probs[i][t] - (t == gold[i] ? 1.0 : 0.0);
            const auto& top = f.acts[depth][i];
            for (std::size_t t = 0; t < tags; ++t) {
                const double dv = dlogit[t];
                double* row = g[gi_out_w].data() + t * h;
                for (std::size_t c = 0; c < h; ++c) row[c] += dv * top[c];
                g[gi_out_b][t] += dv;
            }
            for (std::size_t c = 0; c < h; ++c) {
                double acc = 0.0;
                for (std::size_t t = 0; t < tags; ++t)
                    acc += static_cast<double>(out_w_[t * h + c]) * dlogit[t];
                dh[i][c] = acc;
            }
        }

        for (std::size_t l = depth; l-- > 0;) {
            std::vector<std::vector<double>> dprev(n, std::vector<double>(h, 0.0));
            for (std::size_t i = 0; i < n; ++i) {
                // ReLU mask: post-activation > 0 iff preactivation > 0
                for (std::size_t c = 0; c < h; ++c)
                    da[c] = f.acts[l + 1][i][c] > 0.0 ? dh[i][c] : 0.0;

                std::fill(x.begin(), x.end(), 0.0);
                for (std::size_t o = 0; o < k; ++o) {
                    const std::ptrdiff_t j =
                        static_cast<std::ptrdiff_t>(i + o) - static_cast<std::ptrdiff_t>(w);
                    if (j >= 0 && j < static_cast<std::ptrdiff_t>(n))
                        std::copy(f.acts[l][static_cast<std::size_t>(j)].begin(),
                                  f.acts[l][static_cast<std::size_t>(j)].end(),
                                  x.begin() + static_cast<std::ptrdiff_t>(o * h));
                }
                auto& gw = g[6 + 2 * l];
                auto& gb = g[7 + 2 * l];
                for (std::size_t r = 0; r < h; ++r) {
                    const double dv = da[r];
                    if (dv == 0.0) continue;
                    double* row = gw.data() + r * (k * h);
                    for (std::size_t c = 0; c < k * h; ++c) row[c] += dv * x[c];
                    gb[r] += dv;
                }
                std::fill(dx.begin(), dx.end(), 0.0);
                const auto& wl = enc_w_[l];
                for (std::size_t r = 0; r < h; ++r) {
                    const double dv = da[r];
                    if (dv == 0.0) continue;
                    const float* row = wl.data() + r * (k * h);
                    for (std::size_t c = 0; c < k * h; ++c)
                        dx[c] += static_cast<double>(row[c]) * dv;
                }
                for (std::size_t o = 0; o < k; ++o) {
                    const std::ptrdiff_t j =
                        static_cast<std::ptrdiff_t>(i + o) - static_cast<std::ptrdiff_t>(w);
                    if (j >= 0 && j < static_cast<std::ptrdiff_t>(n))
                        for (std::size_t c = 0; c < h; ++c)
                            dprev[static_cast<std::size_t>(j)][c] += dx[o * h + c];
                }
            }
            dh = std::move(dprev);
        }

        // projection (linear) and embeddings
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t r = 0; r < h; ++r) {
                const double dv = dh[i][r];
                if (dv == 0.0) continue;
                double* row = g[gi_proj_w].data() + r * d4;
                for (std::size_t c = 0; c < d4; ++c) row[c] += dv * f.embed[i][c];
                g[gi_proj_b][r] += dv;
            }
            for (std::size_t t = 0; t < 4; ++t) {
                double* dst = g[t].data() + f.rows[i][t] * d;
                for (std::size_t c = 0; c < d; ++c) {
                    double acc = 0.0;
                    for (std::size_t r = 0; r < h; ++r)
                        acc += static_cast<double>(proj_w_[r * d4 + t * d + c]) * dh[i][r];
                    dst[c] += acc;
                }
            }
        }
    }

    if (token_count == 0) return 0.0;
    const double scale = 1.0 / static_cast<double>(token_count);
    if (grads)
        for (auto& t : *grads)
            for (auto& v : t) v *= scale;
    return loss_sum * scale;
}

double NerModel::loss(const corpus::Corpus& docs) { return accumulate(docs, nullptr); }

std::vector<std::vector<double>> NerModel::gradients(const corpus::Corpus& docs) {
    std::vector<std::vector<double>> grads;
    for (const auto& t : tensors()) grads.emplace_back(t.size, 0.0);
    accumulate(docs, &grads);
    return grads;
}

TrainingLog NerModel::train(const corpus::Corpus& docs, const TrainConfig& tc,
                            const corpus::Corpus* eval) {
    if (!tc.epochs || !tc.batch_size || tc.learning_rate <= 0.0)
        throw std::invalid_argument("TrainConfig: epochs, batch_size and learning_rate must be positive");
    // surface labeling/alignment errors before the first update
    for (const auto& doc : docs) gold_tags(doc, tokenize(doc.text));

    TrainingLog log;
    Rng shuffle_rng(tc.shuffle_seed);
    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const auto views = tensors();
    std::vector<std::vector<double>> grads;
    for (const auto& t : views) grads.emplace_back(t.size, 0.0);

    for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_weighted = 0.0;
        std::size_t tokens_total = 0;
        for (std::size_t b = 0; b < order.size(); b += tc.batch_size) {
            corpus::Corpus batch;
            for (std::size_t i = b; i < std::min(b + tc.batch_size, order.size()); ++i)
                batch.push_back(docs[order[i]]);
            std::size_t batch_tokens = 0;
            for (const auto& doc : batch) batch_tokens += tokenize(doc.text).size();
            if (batch_tokens == 0) continue;

            for (auto& t : grads) std::fill(t.begin(), t.end(), 0.0);
            const double batch_loss = accumulate(batch, &grads);
            for (std::size_t t = 0; t < views.size(); ++t) {
                float* w = views[t].data;
                const auto& gt = grads[t];
                for (std::size_t i = 0; i < views[t].size; ++i)
                    w[i] = static_cast<float>(static_cast<double>(w[i]) - tc.learning_rate * gt[i]);
            }
            loss_weighted += batch_loss * static_cast<double>(batch_tokens);
            tokens_total += batch_tokens;
        }
        log.epoch_loss.push_back(tokens_total ? loss_weighted / static_cast<double>(tokens_total) : 0.0);
        if (eval) log.epoch_f1.push_back(micro_f1(*eval));
    }
    return log;
}

double NerModel::micro_f1(const corpus::Corpus& docs) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& doc : docs) {
        const auto result = predict(doc.text);
        std::vector<corpus::EntitySpan> gold = doc.entities;
        std::vector<bool> matched(gold.size(), false);
        for (const auto& e : result.entities) {
            bool hit = false;
            for (std::size_t i = 0; i < gold.size(); ++i) {
                if (!matched[i] && gold[i].start == e.start && gold[i].end == e.end &&
                    gold[i].label == e.label) {
                    matched[i] = true;
                    hit = true;
                    break;
                }
            }
            if (hit)
                ++tp;
            else
                ++fp;
        }
        for (bool m : matched)
            if (!m) ++fn;
    }
    const double p = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double r = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    return (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
}

namespace {

void write_f32_le(std::ostream& out, const float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits;
        std::memcpy(&bits, &data[i], 4);
        const unsigned char bytes[4] = {
            static_cast<unsigned char>(bits & 0xFF), static_cast<unsigned char>((bits >> 8) & 0xFF),
            static_cast<unsigned char>((bits >> 16) & 0xFF),
            static_cast<unsigned char>((bits >> 24) & 0xFF)};
        out.write(reinterpret_cast<const char*>(bytes), 4);
    }
}

void read_f32_le(std::istream& in, float* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        unsigned char bytes[4];
        if (!in.read(reinterpret_cast<char*>(bytes), 4))
            throw std::runtime_error("model load: truncated weight data");
        const std::uint32_t bits = static_cast<std::uint32_t>(bytes[0]) |
                                   (static_cast<std::uint32_t>(bytes[1]) << 8) |
                                   (static_cast<std::uint32_t>(bytes[2]) << 16) |
                                   (static_cast<std::uint32_t>(bytes[3]) << 24);
        std::memcpy(&data[i], &bits, 4);
    }
}

}  // namespace

void NerModel::save(std::ostream& out) const {
    out << "NERLEAK1\n";
    nlohmann::json meta;  // nlohmann::json sorts keys, giving the canonical form
    meta["version"] = 1;
    meta["embed_rows_per_feature"] = config_.embed_rows_per_feature;
    meta["embed_dim_per_feature"] = config_.embed_dim_per_feature;
    meta["encoder_depth"] = config_.encoder_depth;
    meta["window"] = config_.window;
    meta["hidden_dim"] = config_.hidden_dim;
    meta["seed"] = config_.seed;
    meta["labels"] = labels_.labels();
    out << meta.dump() << "\n";
    for (const auto& t : const_cast<NerModel*>(this)->tensors()) write_f32_le(out, t.data, t.size);
    vocab_.save(out);
}

NerModel NerModel::load(std::istream& in) {
    std::string magic;
    if (!std::getline(in, magic) || magic != "NERLEAK1")
        throw std::runtime_error("model load: bad magic (expected NERLEAK1)");
    std::string meta_line;
    if (!std::getline(in, meta_line)) throw std::runtime_error("model load: missing metadata");
    const auto meta = nlohmann::json::parse(meta_line);
    if (meta.at("version").get<int>() != 1)
        throw std::runtime_error("model load: unsupported version " + meta.at("version").dump());
    ModelConfig cfg;
    cfg.embed_rows_per_feature = meta.at("embed_rows_per_feature").get<std::size_t>();
    cfg.embed_dim_per_feature = meta.at("embed_dim_per_feature").get<std::size_t>();
    cfg.encoder_depth = meta.at("encoder_depth").get<std::size_t>();
    cfg.window = meta.at("window").get<std::size_t>();
    cfg.hidden_dim = meta.at("hidden_dim").get<std::size_t>();
    cfg.seed = meta.at("seed").get<std::uint64_t>();
    NerModel m(cfg, LabelSet(meta.at("labels").get<std::vector<std::string>>()));
    for (auto& t : m.tensors()) read_f32_le(in, t.data, t.size);
    m.vocab_ = vocab::Vocabulary::load(in);
    return m;
}

void NerModel::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("model save: cannot open " + path);
    save(out);
}

NerModel NerModel::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("model load: cannot open " + path);
    return load(in);
}

}  // namespace nerleak::ner
