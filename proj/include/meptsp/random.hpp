#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace meptsp {

using Rng = std::mt19937_64;

/// Uniform integer in [0, bound). `bound` must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t bound) {
    return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng);
}

inline double uniform_real(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline bool bernoulli(Rng& rng, double p) {
    return uniform_real(rng) < p;
}

} // namespace meptsp
