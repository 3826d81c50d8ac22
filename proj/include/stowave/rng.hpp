#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace stowave {

// Counter-based deterministic random numbers. All stochastic sampling in the
// library goes through these so that results are bit-reproducible across
// platforms and thread counts (std::normal_distribution is not portable).

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash a seed together with a small integer key (e.g. a frequency vector).
inline uint64_t hash_key(uint64_t seed, int64_t a, int64_t b = 0, int64_t c = 0, int64_t d = 0) {
    uint64_t s = seed ^ 0x2545f4914f6cdd1dULL;
    splitmix64(s);
    s ^= static_cast<uint64_t>(a) * 0x9e3779b97f4a7c15ULL;
    splitmix64(s);
    s ^= static_cast<uint64_t>(b) * 0xc2b2ae3d27d4eb4fULL;
    splitmix64(s);
    s ^= static_cast<uint64_t>(c) * 0x165667b19e3779f9ULL;
    splitmix64(s);
    s ^= static_cast<uint64_t>(d) * 0xd6e8feb86659fd93ULL;
    return splitmix64(s);
}

// Uniform in (0, 1]; never returns 0 so it is safe under log().
inline double uniform_open(uint64_t& state) {
    return (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1.0p-53;
}

// One standard Gaussian pair via Box-Muller.
inline std::array<double, 2> gaussian_pair(uint64_t& state) {
    const double u = uniform_open(state);
    const double v = uniform_open(state);
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 2.0 * M_PI * v;
    return {r * std::cos(a), r * std::sin(a)};
}

inline double gaussian(uint64_t& state) { return gaussian_pair(state)[0]; }

} // namespace stowave
