#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nerleak::utf8 {

// All character offsets in this library count Unicode scalar values, not
// bytes. Input is UTF-8; malformed bytes are decoded as U+FFFD so that
// arbitrary data never crashes the pipeline.

inline constexpr char32_t kReplacement = 0xFFFD;

std::vector<char32_t> decode(std::string_view s);
std::string encode(const std::vector<char32_t>& cps);
std::string encode_one(char32_t cp);

/// Number of Unicode scalar values in a UTF-8 string.
std::size_t length(std::string_view s);

/// Substring [from, to) in scalar-value offsets.
std::string substr(std::string_view s, std::size_t from, std::size_t to);

}  // namespace nerleak::utf8
