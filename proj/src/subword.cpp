#include "nerleak/subword.hpp"

#include <stdexcept>

#include "nerleak/metrics.hpp"
#include "nerleak/utf8.hpp"

namespace nerleak::subword {

namespace {

bool is_ascii_lower(char32_t c) { return c >= U'a' && c <= U'z'; }
bool is_ascii_upper(char32_t c) { return c >= U'A' && c <= U'Z'; }
bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

char32_t shape_class(char32_t c) {
    if (is_ascii_lower(c)) return U'x';
    if (is_ascii_upper(c)) return U'X';
    if (is_ascii_digit(c)) return U'd';
    return c;  // special symbol, kept intact
}

}  // namespace

std::string prefix(std::string_view word, const SubwordConfig& cfg) {
    const auto cps = utf8::decode(word);
    const std::size_t n = std::min(cfg.prefix_len, cps.size());
    return utf8::encode({cps.begin(), cps.begin() + static_cast<std::ptrdiff_t>(n)});
}

std::string suffix(std::string_view word, const SubwordConfig& cfg) {
    const auto cps = utf8::decode(word);
    const std::size_t n = std::min(cfg.suffix_len, cps.size());
    return utf8::encode({cps.end() - static_cast<std::ptrdiff_t>(n), cps.end()});
}

std::string norm(std::string_view word) {
    auto cps = utf8::decode(word);
    for (auto& c : cps)
        if (is_ascii_upper(c)) c = c - U'A' + U'a';
    return utf8::encode(cps);
}

std::string shape(std::string_view word, const SubwordConfig& cfg) {
    const auto cps = utf8::decode(word);
    std::vector<char32_t> out;
    out.reserve(cps.size());
    char32_t run_char = 0;
    std::size_t run_len = 0;
    for (char32_t c : cps) {
        const char32_t sc = shape_class(c);
        const bool cappable = (sc == U'x' || sc == U'X' || sc == U'd');
        if (cappable && sc == run_char) {
            ++run_len;
            if (run_len > cfg.shape_run_cap) continue;
        } else {
            run_char = cappable ? sc : 0;
            run_len = 1;
        }
        out.push_back(sc);
    }
    return utf8::encode(out);
}

SubwordFeatures features(std::string_view word, const SubwordConfig& cfg) {
    return {prefix(word, cfg), suffix(word, cfg), norm(word), shape(word, cfg)};
}

bool equal_in_pipeline(std::string_view w1, std::string_view w2, const SubwordConfig& cfg) {
    return features(w1, cfg) == features(w2, cfg);
}

std::size_t hamming_difference(std::string_view w1, std::string_view w2) {
    const auto a = utf8::decode(w1);
    const auto b = utf8::decode(w2);
    if (a.size() != b.size())
        throw std::invalid_argument("hamming_difference: words differ in length (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++diff;
    return diff;
}

std::string mid(std::string_view word, const SubwordConfig& cfg) {
    const auto cps = utf8::decode(word);
    if (cps.size() <= cfg.prefix_len + cfg.suffix_len) return "";
    return utf8::encode({cps.begin() + static_cast<std::ptrdiff_t>(cfg.prefix_len),
                         cps.end() - static_cast<std::ptrdiff_t>(cfg.suffix_len)});
}

std::size_t f_distance(std::string_view r, std::string_view r2, const SubwordConfig& cfg) {
    const auto fa = features(r, cfg);
    const auto fb = features(r2, cfg);
    return metrics::levenshtein(fa.prefix, fb.prefix) + metrics::levenshtein(fa.suffix, fb.suffix) +
           metrics::levenshtein(fa.shape, fb.shape) + metrics::levenshtein(fa.norm, fb.norm);
}

}  // namespace nerleak::subword
