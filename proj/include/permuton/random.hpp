#ifndef PERMUTON_RANDOM_HPP
#define PERMUTON_RANDOM_HPP

#include <cstdint>
#include <random>

namespace permuton {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits, so draws are identical across standard libraries.
inline double unit_uniform(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// splitmix64 finalizer; used to derive independent per-chunk seeds from one user seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}

#endif
