#pragma once

#include <cstdint>

// Deterministic 64-bit mixing primitives. Everything that needs randomness in
// this library derives it from these so that results are bit-identical across
// platforms, runs and thread counts.

namespace tabwm {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer (without the increment step). Bijective on uint64.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// i-th word of the counter stream for a given seed, i >= 1.
inline constexpr std::uint64_t stream_word(std::uint64_t seed, std::uint64_t i) {
    return mix64(seed + i * kGolden);
}

/// Map a word to [0, 1) with 53 bits of precision.
inline constexpr double u01(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// Map a word to (0, 1]; safe as a log() argument.
inline constexpr double u01_open(std::uint64_t word) {
    return (static_cast<double>(word >> 11) + 1.0) * 0x1.0p-53;
}

/// Counter-based stream: successive next() calls walk the seed's word stream.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next() { return stream_word(seed_, ++i_); }
    double next_u01() { return u01(next()); }
    double next_u01_open() { return u01_open(next()); }

    /// Integer in [0, n) via modulo (bias is negligible for n << 2^64).
    std::uint64_t next_below(std::uint64_t n) { return next() % n; }

private:
    std::uint64_t seed_;
    std::uint64_t i_ = 0;
};

}  // namespace tabwm
