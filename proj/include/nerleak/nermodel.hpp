#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nerleak/corpus.hpp"
#include "nerleak/subword.hpp"
#include "nerleak/vocab.hpp"

namespace nerleak::ner {

struct Token {
    std::string text;
    std::size_t start = 0;  // scalar-value offsets into the query text
    std::size_t end = 0;
};

/// Whitespace split, then a single trailing . , ; : ! ? ' " is broken off
/// any piece longer than one character.
std::vector<Token> tokenize(std::string_view text);

/// Ordered entity labels. Tags are BILOU per label plus O, laid out as
/// O, then B/I/L/U per label in order, giving 4*|labels| + 1 tags.
class LabelSet {
public:
    explicit LabelSet(std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    std::size_t tag_count() const { return 4 * labels_.size() + 1; }
    const std::vector<std::string>& labels() const { return labels_; }

    /// Throws on an unknown label.
    std::size_t label_index(std::string_view label) const;

    static constexpr std::size_t kTagO = 0;
    std::size_t tag_b(std::size_t label) const { return 1 + 4 * label; }
    std::size_t tag_i(std::size_t label) const { return 2 + 4 * label; }
    std::size_t tag_l(std::size_t label) const { return 3 + 4 * label; }
    std::size_t tag_u(std::size_t label) const { return 4 + 4 * label; }
    std::string tag_name(std::size_t tag) const;

private:
    std::vector<std::string> labels_;
};

struct ModelConfig {
    std::size_t embed_rows_per_feature = 4096;
    std::size_t embed_dim_per_feature = 16;
    std::size_t encoder_depth = 3;
    std::size_t window = 1;
    std::size_t hidden_dim = 64;
    std::uint64_t seed = 0;

    std::size_t receptive_field() const { return encoder_depth * (2 * window + 1); }
};

struct TrainConfig {
    std::size_t epochs = 1;
    std::size_t batch_size = 50;
    double learning_rate = 0.5;
    std::uint64_t shuffle_seed = 0;
};

struct TrainingLog {
    std::vector<double> epoch_loss;  // mean per-token cross-entropy
    std::vector<double> epoch_f1;    // filled when an eval corpus is given
};

struct Entity {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string label;
    double score = 0.0;
};

struct QueryResult {
    std::vector<Token> tokens;
    std::vector<std::vector<double>> tag_distributions;
    std::vector<Entity> entities;
    // vocabulary accounting for this query; the substrate of the timing attack
    int miss_count = 0;
    double lookup_cost = 0.0;
};

/// Named view over one parameter tensor, used for serialization, SGD and
/// gradient checking. Tensors are row-major float32.
struct TensorView {
    std::string name;
    float* data = nullptr;
    std::size_t size = 0;
};

/// Deterministic BILOU token tagger: hash embeddings of the four sub-word
/// features, a linear projection, a fixed-depth windowed ReLU encoder and
/// a softmax output layer. Owns its vocabulary. Parameters are float32;
/// all arithmetic runs in double.
class NerModel {
public:
    NerModel(const ModelConfig& cfg, LabelSet labels, const vocab::CostModel& cm = {});

    /// Hash-embed one feature quadruple: four table rows concatenated in
    /// prefix | suffix | norm | shape order. Pure (no vocabulary access).
    std::vector<double> embed_token(const subword::SubwordFeatures& f) const;

    /// Projection plus windowed encoder stack over a token-embedding
    /// sequence. Empty input gives empty output.
    std::vector<std::vector<double>> encode(const std::vector<std::vector<double>>& embeddings) const;

    /// Full pipeline with insert-on-miss vocabulary side effects, greedy
    /// BILOU decoding and validity repair.
    QueryResult predict(const std::string& text);

    /// Geometric mean over the span's tokens of the probability assigned
    /// to the span's correct BILOU tags. Throws on a span that does not
    /// align to token boundaries.
    double score_span(const std::string& text, std::size_t start, std::size_t end,
                      const std::string& label);

    /// Mini-batch SGD on mean per-token cross-entropy.
    TrainingLog train(const corpus::Corpus& docs, const TrainConfig& tc,
                      const corpus::Corpus* eval = nullptr);

    /// Exact span+label micro-averaged F1 over the corpus.
    double micro_f1(const corpus::Corpus& docs);

    /// Mean per-token cross-entropy over the corpus (no update).
    double loss(const corpus::Corpus& docs);

    /// Analytic gradients of loss(docs), ordered like tensors().
    std::vector<std::vector<double>> gradients(const corpus::Corpus& docs);

    std::vector<TensorView> tensors();

    vocab::Vocabulary& vocabulary() { return vocab_; }
    const vocab::Vocabulary& vocabulary() const { return vocab_; }
    const ModelConfig& config() const { return config_; }
    const LabelSet& label_set() const { return labels_; }

    /// Container with magic NERLEAK1: a key-sorted metadata line, raw
    /// little-endian float32 tensors in declared order, then the embedded
    /// vocabulary in its own format.
    void save(std::ostream& out) const;
    static NerModel load(std::istream& in);
    void save_file(const std::string& path) const;
    static NerModel load_file(const std::string& path);

private:
    struct Forward;

    Forward run_forward(const std::string& text);
    std::vector<std::size_t> gold_tags(const corpus::AnnotatedDocument& doc,
                                       const std::vector<Token>& tokens) const;
    std::pair<std::size_t, std::size_t> align_span(const std::vector<Token>& tokens,
                                                   std::size_t start, std::size_t end) const;
    double accumulate(const corpus::Corpus& docs, std::vector<std::vector<double>>* grads);

    ModelConfig config_;
    LabelSet labels_;
    vocab::Vocabulary vocab_;

    // parameters, row-major float32
    std::array<std::vector<float>, 4> embed_;          // prefix, suffix, norm, shape
    std::vector<float> proj_w_, proj_b_;               // hidden x 4d, hidden
    std::vector<std::vector<float>> enc_w_, enc_b_;    // hidden x K*hidden, hidden
    std::vector<float> out_w_, out_b_;                 // tags x hidden, tags
};

}  // namespace nerleak::ner
