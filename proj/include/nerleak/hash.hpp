#pragma once

#include <cstdint>
#include <string_view>

namespace nerleak {

/// FNV-1a 64-bit over the bytes of s. Used both for embedding-row selection
/// and for artifact provenance hashes; stable across platforms so saved
/// models are portable.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace nerleak
