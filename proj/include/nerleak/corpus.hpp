#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "nerleak/rng.hpp"

namespace nerleak::corpus {

/// Character offsets count Unicode scalar values, end exclusive.
struct EntitySpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string label;

    bool operator==(const EntitySpan&) const = default;
};

struct AnnotatedDocument {
    std::string text;
    std::vector<EntitySpan> entities;

    bool operator==(const AnnotatedDocument&) const = default;
};

using Corpus = std::vector<AnnotatedDocument>;

/// Throws std::invalid_argument when span bounds are invalid, labels are
/// empty, or spans overlap.
void validate(const AnnotatedDocument& doc);

/// Placeholder marker for phrase templates; disallowed in literal text.
inline constexpr std::string_view kPlaceholder = "◆";

/// A phrase with exactly one placeholder, e.g. "Alice's secret is ◆."
struct PhraseTemplate {
    std::string template_text;
    std::vector<EntitySpan> fixed_entities;
    std::string secret_label = "SECRET";
};

/// Replace the placeholder with the secret and annotate it with
/// secret_label; fixed entities after the placeholder are shifted.
/// The secret must be non-empty and whitespace-free so it stays one token.
AnnotatedDocument render(const PhraseTemplate& t, std::string_view secret);

struct InsertionResult {
    Corpus corpus;
    std::vector<std::size_t> positions;
};

/// Insert `copies` rendered documents per secret at seeded-random
/// positions in the corpus order.
InsertionResult insert_phrases(const Corpus& corpus, const PhraseTemplate& t,
                               const std::vector<std::string>& secrets, std::size_t copies,
                               std::uint64_t rng_seed);

/// Sentence templates for the synthetic corpus, shipped as a data file.
/// Labeled templates contain exactly one {LABEL} slot.
struct SentenceTemplates {
    std::vector<std::string> filler;
    std::map<std::string, std::vector<std::string>> labeled;
};

SentenceTemplates load_templates(const std::string& path);

struct SynthSpec {
    std::size_t size = 0;                        // total document count
    std::map<std::string, std::size_t> label_counts;  // docs carrying each label
};

/// Deterministic synthetic corpus: exactly label_counts[l] documents carry
/// label l (one entity each); the rest are entity-free filler. Entity
/// values are drawn from an index range derived from the seed, so corpora
/// built from different seeds have disjoint entity inventories.
Corpus synth_corpus(const SynthSpec& spec, const SentenceTemplates& templates, std::uint64_t rng_seed);

struct SplitResult {
    Corpus train;
    Corpus test;
};

/// Disjoint, exhaustive, seeded split; train gets floor(n * fraction) docs.
SplitResult split(const Corpus& corpus, double train_fraction, std::uint64_t rng_seed);

using DummyGenerator = std::function<std::string(Rng&)>;

/// Replace the text of every span with `label` by a generated value and
/// recompute all span offsets; surrounding text is unchanged.
Corpus replace_with_dummy(const Corpus& corpus, std::string_view label, const DummyGenerator& gen,
                          std::uint64_t rng_seed);

/// UTF-8 JSON corpus format, version 1. Bit-exact round-trip.
std::string to_json(const Corpus& corpus);
Corpus from_json(std::string_view json_text);
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

}  // namespace nerleak::corpus
