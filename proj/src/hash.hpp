#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace cvad {

// FNV-1a, 64-bit. Used for cache keys and the deterministic mock backends.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 14695981039346656037ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s,
                             std::uint64_t seed = 14695981039346656037ULL) {
    return fnv1a64(s.data(), s.size(), seed);
}

} // namespace cvad
