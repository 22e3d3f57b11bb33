#pragma once
// Deterministic RNG helpers. std::shuffle and the std distributions are
// implementation-defined, so anything that feeds persisted output goes
// through these instead. Same seed, same platform-independent stream.

#include <cstdint>
#include <random>
#include <vector>

namespace kbfresh {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// Uniform index in [0, n). Modulo bias is irrelevant at our sizes and the
// result is reproducible everywhere, unlike uniform_int_distribution.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

inline double uniform_range(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Fisher-Yates.
template <typename T>
void shuffle_deterministic(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace kbfresh
