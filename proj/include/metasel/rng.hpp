#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace metasel {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace detail {

inline std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Stable per-(seed, model, stage) seed. Does not depend on std::hash, thread
/// scheduling, or the order models are visited in.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view model_id, std::string_view stage) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < 8; ++i) {
        h ^= (master >> (8 * i)) & 0xffU;
        h *= 0x100000001b3ULL;
    }
    h = detail::fnv1a(h, model_id);
    h = detail::fnv1a(h ^ 0x1fULL, stage);
    return splitmix64(h);
}

inline Rng make_rng(std::uint64_t master, std::string_view model_id, std::string_view stage) {
    return Rng(derive_seed(master, model_id, stage));
}

} // namespace metasel
