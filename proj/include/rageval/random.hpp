#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace rageval::random {

using Engine = std::mt19937_64;

__extension__ using Wide = unsigned __int128;

/// Derives the seed of stream `stream` from a base seed: the splitmix64
/// finaliser applied to seed + (stream + 1) * 0x9E3779B97F4A7C15. Streams
/// are independent of evaluation order, so resample s always sees the same
/// draws whichever thread computes it.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform integer in [0, n) by Lemire's multiply-shift with rejection.
/// Portable across standard libraries, unlike std::uniform_int_distribution.
inline std::size_t uniform_index(Engine& rng, std::size_t n) {
    const auto bound = static_cast<std::uint64_t>(n);
    std::uint64_t x = rng();
    auto m = static_cast<Wide>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            x = rng();
            m = static_cast<Wide>(x) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::size_t>(m >> 64);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform_unit(Engine& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace rageval::random
