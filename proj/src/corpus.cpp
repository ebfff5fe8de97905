#include "nerleak/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nerleak/secrets.hpp"
#include "nerleak/utf8.hpp"

namespace nerleak::corpus {

void validate(const AnnotatedDocument& doc) {
    const std::size_t len = utf8::length(doc.text);
    std::vector<EntitySpan> spans = doc.entities;
    std::sort(spans.begin(), spans.end(),
              [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
    std::size_t prev_end = 0;
    for (const auto& s : spans) {
        if (s.label.empty()) throw std::invalid_argument("document: empty entity label");
        if (s.start >= s.end || s.end > len)
            throw std::invalid_argument("document: invalid span (" + std::to_string(s.start) + ", " +
                                        std::to_string(s.end) + ") in text of length " +
                                        std::to_string(len));
        if (s.start < prev_end)
            throw std::invalid_argument("document: overlapping spans at offset " +
                                        std::to_string(s.start));
        prev_end = s.end;
    }
}

namespace {

std::size_t placeholder_offset(const PhraseTemplate& t) {
    const auto cps = utf8::decode(t.template_text);
    const auto mark = utf8::decode(kPlaceholder)[0];
    std::size_t pos = std::string::npos, count = 0;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (cps[i] == mark) {
            pos = i;
            ++count;
        }
    }
    if (count != 1)
        throw std::invalid_argument("phrase template must contain exactly one placeholder, found " +
                                    std::to_string(count));
    return pos;
}

}  // namespace

AnnotatedDocument render(const PhraseTemplate& t, std::string_view secret) {
    if (secret.empty()) throw std::invalid_argument("render: secret must be non-empty");
    for (char c : secret)
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
            throw std::invalid_argument("render: whitespace in secret would split it into tokens");

    const std::size_t pos = placeholder_offset(t);
    const std::size_t secret_len = utf8::length(secret);
    const auto cps = utf8::decode(t.template_text);

    AnnotatedDocument doc;
    doc.text = utf8::encode({cps.begin(), cps.begin() + static_cast<std::ptrdiff_t>(pos)});
    doc.text += secret;
    doc.text += utf8::encode({cps.begin() + static_cast<std::ptrdiff_t>(pos) + 1, cps.end()});

    for (const auto& fixed : t.fixed_entities) {
        if (fixed.start <= pos && pos < fixed.end)
            throw std::invalid_argument("render: fixed entity overlaps the placeholder");
        EntitySpan s = fixed;
        if (s.start > pos) {
            s.start += secret_len - 1;
            s.end += secret_len - 1;
        }
        doc.entities.push_back(s);
    }
    doc.entities.push_back({pos, pos + secret_len, t.secret_label});
    std::sort(doc.entities.begin(), doc.entities.end(),
              [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
    validate(doc);
    return doc;
}

InsertionResult insert_phrases(const Corpus& corpus, const PhraseTemplate& t,
                               const std::vector<std::string>& secrets, std::size_t copies,
                               std::uint64_t rng_seed) {
    if (copies < 1) throw std::invalid_argument("insert_phrases: copies must be >= 1");
    Rng rng(rng_seed);
    InsertionResult out;
    out.corpus = corpus;
    for (const auto& secret : secrets) {
        const AnnotatedDocument doc = render(t, secret);
        for (std::size_t c = 0; c < copies; ++c) {
            const std::size_t pos = static_cast<std::size_t>(rng.below(out.corpus.size() + 1));
            out.corpus.insert(out.corpus.begin() + static_cast<std::ptrdiff_t>(pos), doc);
            out.positions.push_back(pos);
        }
    }
    return out;
}

SentenceTemplates load_templates(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_templates: cannot open " + path);
    nlohmann::json j;
    in >> j;
    SentenceTemplates t;
    for (const auto& s : j.at("filler")) t.filler.push_back(s.get<std::string>());
    for (const auto& [label, list] : j.at("labeled").items()) {
        auto& vec = t.labeled[label];
        const std::string slot = "{" + label + "}";
        for (const auto& s : list) {
            const std::string text = s.get<std::string>();
            if (text.find(slot) == std::string::npos)
                throw std::runtime_error("load_templates: template for " + label +
                                         " is missing its " + slot + " slot: " + text);
            vec.push_back(text);
        }
    }
    if (t.filler.empty()) throw std::runtime_error("load_templates: no filler templates");
    return t;
}

namespace {

AnnotatedDocument fill_labeled_template(const std::string& tmpl, const std::string& label,
                                        const std::string& value) {
    const std::string slot = "{" + label + "}";
    const std::size_t byte_pos = tmpl.find(slot);
    AnnotatedDocument doc;
    doc.text = tmpl.substr(0, byte_pos) + value + tmpl.substr(byte_pos + slot.size());
    const std::size_t start = utf8::length(tmpl.substr(0, byte_pos));
    doc.entities.push_back({start, start + utf8::length(value), label});
    validate(doc);
    return doc;
}

}  // namespace

Corpus synth_corpus(const SynthSpec& spec, const SentenceTemplates& templates,
                    std::uint64_t rng_seed) {
    std::size_t labeled_total = 0;
    for (const auto& [label, count] : spec.label_counts) {
        if (!templates.labeled.count(label))
            throw std::invalid_argument("synth_corpus: no templates for label '" + label + "'");
        labeled_total += count;
    }
    if (labeled_total > spec.size)
        throw std::invalid_argument("synth_corpus: label counts exceed corpus size");

    Rng rng(rng_seed);
    // entity indices come from a seed-specific range so different seeds
    // yield disjoint inventories
    std::uint64_t next_index = rng_seed << 20;

    Corpus docs;
    docs.reserve(spec.size);
    for (const auto& [label, count] : spec.label_counts) {
        const auto& list = templates.labeled.at(label);
        for (std::size_t i = 0; i < count; ++i) {
            const std::string value = secrets::entity_value(label, next_index++);
            docs.push_back(fill_labeled_template(rng.pick(list), label, value));
        }
    }
    while (docs.size() < spec.size) docs.push_back({rng.pick(templates.filler), {}});
    rng.shuffle(docs);
    return docs;
}

SplitResult split(const Corpus& corpus, double train_fraction, std::uint64_t rng_seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw std::invalid_argument("split: train_fraction must be in (0, 1)");
    std::vector<std::size_t> idx(corpus.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(rng_seed);
    rng.shuffle(idx);
    const std::size_t n_train =
        static_cast<std::size_t>(train_fraction * static_cast<double>(corpus.size()));
    SplitResult out;
    for (std::size_t i = 0; i < idx.size(); ++i)
        (i < n_train ? out.train : out.test).push_back(corpus[idx[i]]);
    return out;
}

Corpus replace_with_dummy(const Corpus& corpus, std::string_view label, const DummyGenerator& gen,
                          std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    Corpus out;
    out.reserve(corpus.size());
    for (const auto& doc : corpus) {
        std::vector<EntitySpan> spans = doc.entities;
        std::sort(spans.begin(), spans.end(),
                  [](const EntitySpan& a, const EntitySpan& b) { return a.start < b.start; });
        const auto cps = utf8::decode(doc.text);
        AnnotatedDocument next;
        std::size_t cursor = 0;       // scalar offset into the original text
        std::size_t out_len = 0;      // scalar length of the rebuilt text
        for (auto span : spans) {
            next.text += utf8::encode({cps.begin() + static_cast<std::ptrdiff_t>(cursor),
                                       cps.begin() + static_cast<std::ptrdiff_t>(span.start)});
            out_len += span.start - cursor;
            std::string value;
            if (span.label == label) {
                value = gen(rng);
            } else {
                value = utf8::encode({cps.begin() + static_cast<std::ptrdiff_t>(span.start),
                                      cps.begin() + static_cast<std::ptrdiff_t>(span.end)});
            }
            cursor = span.end;
            next.text += value;
            const std::size_t vlen = utf8::length(value);
            next.entities.push_back({out_len, out_len + vlen, span.label});
            out_len += vlen;
        }
        next.text += utf8::encode({cps.begin() + static_cast<std::ptrdiff_t>(cursor), cps.end()});
        validate(next);
        out.push_back(std::move(next));
    }
    return out;
}

std::string to_json(const Corpus& corpus) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["documents"] = nlohmann::ordered_json::array();
    for (const auto& doc : corpus) {
        nlohmann::ordered_json d;
        d["text"] = doc.text;
        d["entities"] = nlohmann::ordered_json::array();
        for (const auto& s : doc.entities)
            d["entities"].push_back({{"start", s.start}, {"end", s.end}, {"label", s.label}});
        j["documents"].push_back(std::move(d));
    }
    return j.dump();
}

Corpus from_json(std::string_view json_text) {
    const auto j = nlohmann::json::parse(json_text);
    if (j.at("version").get<int>() != 1)
        throw std::runtime_error("corpus: unsupported version " + j.at("version").dump());
    Corpus out;
    for (const auto& d : j.at("documents")) {
        AnnotatedDocument doc;
        doc.text = d.at("text").get<std::string>();
        if (d.contains("entities"))
            for (const auto& s : d.at("entities"))
                doc.entities.push_back({s.at("start").get<std::size_t>(),
                                        s.at("end").get<std::size_t>(),
                                        s.at("label").get<std::string>()});
        validate(doc);
        out.push_back(std::move(doc));
    }
    return out;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_corpus: cannot open " + path);
    out << to_json(corpus) << "\n";
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_corpus: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
    return from_json(text);
}

}  // namespace nerleak::corpus
