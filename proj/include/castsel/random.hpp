#pragma once

#include <cstdint>
#include <random>

namespace castsel {

// Portable draws on top of mt19937_64, whose raw output is fixed by the
// standard. The std distributions are implementation-defined, which would
// break byte-identical reruns across toolchains.

/// Uniform integer in [0, bound). bound must be positive.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace castsel
