// Deterministic RNG contract: every randomized operation takes an explicit
// generator; per-trial streams are derived as seed XOR trial-index so trials
// are order-independent.

#pragma once

#include <cstdint>
#include <random>

namespace triq {

using Rng = std::mt19937_64;

// splitmix64 finalizer, decorrelates nearby seed values before feeding mt19937.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial_index) {
    return Rng(mix64(seed ^ trial_index));
}

// Uniform double in [0,1) built from the top 53 bits; avoids
// implementation-defined std::uniform_real_distribution behavior.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index in [0, n) by inversion of the cumulative distribution.
// probs need not be exactly normalized; the tail absorbs rounding.
template <typename Container>
int sample_index(const Container& probs, Rng& rng) {
    const double r = uniform01(rng);
    double cum = 0.0;
    int last_positive = -1;
    int i = 0;
    for (double p : probs) {
        if (p > 0.0) last_positive = i;
        cum += p;
        if (r < cum) return i;
        ++i;
    }
    return last_positive;
}

}  // namespace triq
