#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace restobench {

// Deterministic, language-portable randomness. Every clip owns one stream
// derived from (master_seed, clip_index), so dataset builds are bit-identical
// across runs and thread schedules regardless of build order.

namespace detail {
inline constexpr uint64_t kSplitmixGamma = 0x9E3779B97F4A7C15ull;

inline uint64_t splitmix64_finalize(uint64_t z) {
    z += kSplitmixGamma;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}
} // namespace detail

struct RngState {
    uint64_t state = 0;

    uint64_t next_u64() {
        state += detail::kSplitmixGamma;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
};

// Per-clip stream derivation: clip_index selects a stream under one master
// seed; distinct indices give distinct, independent-looking states.
inline RngState derive_stream(uint64_t master_seed, uint64_t clip_index) {
    return RngState{detail::splitmix64_finalize(master_seed + clip_index * detail::kSplitmixGamma)};
}

// Uniform variate in [0,1), 53-bit resolution.
inline double next_unit(RngState& rng) {
    return static_cast<double>(rng.next_u64() >> 11) * (1.0 / 9007199254740992.0); // 2^53
}

// Box-Muller transform on two unit variates; u1 in (0,1], u2 in [0,1).
inline double box_muller(double u1, double u2) {
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Standard normal variate. Consumes exactly two uniform draws.
inline double next_gaussian(RngState& rng) {
    double u1 = 1.0 - next_unit(rng); // (0,1], keeps log() finite
    double u2 = next_unit(rng);
    return box_muller(u1, u2);
}

} // namespace restobench
