#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace nerleak::subword {

struct SubwordConfig {
    std::size_t prefix_len = 1;
    std::size_t suffix_len = 3;
    std::size_t shape_run_cap = 4;
};

/// The (prefix, suffix, norm, shape) quadruple of a word. This is the unit
/// the tokenizer interns into the vocabulary and the basis of f-distance.
struct SubwordFeatures {
    std::string prefix;
    std::string suffix;
    std::string norm;
    std::string shape;

    bool operator==(const SubwordFeatures&) const = default;
};

/// First min(prefix_len, |word|) characters, case preserved.
std::string prefix(std::string_view word, const SubwordConfig& cfg = {});

/// Last min(suffix_len, |word|) characters, case preserved.
std::string suffix(std::string_view word, const SubwordConfig& cfg = {});

/// Character-wise lowercase; ASCII letters only, everything else unchanged.
/// Length in scalar values is preserved.
std::string norm(std::string_view word);

/// Orthographic signature: ASCII lower/upper/digit become x/X/d, any other
/// character is kept intact. Maximal runs of the same character among
/// {X, x, d} are capped at shape_run_cap; kept-intact symbols are never
/// truncated.
std::string shape(std::string_view word, const SubwordConfig& cfg = {});

SubwordFeatures features(std::string_view word, const SubwordConfig& cfg = {});

/// True iff the two words have identical feature quadruples.
bool equal_in_pipeline(std::string_view w1, std::string_view w2, const SubwordConfig& cfg = {});

/// Number of positions where two equal-length words differ, case-sensitive.
/// Throws std::invalid_argument on a length mismatch.
std::size_t hamming_difference(std::string_view w1, std::string_view w2);

/// Characters strictly between the prefix and the suffix; empty when the
/// word is no longer than prefix_len + suffix_len.
std::string mid(std::string_view word, const SubwordConfig& cfg = {});

/// Sum of the edit distances between the four feature strings of r and r2.
std::size_t f_distance(std::string_view r, std::string_view r2, const SubwordConfig& cfg = {});

}  // namespace nerleak::subword
