#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace castsel {

// Seedless 64-bit hash used for subtree fingerprints: an FNV-1a fold over the
// input bytes followed by the MurmurHash3 fmix64 avalanche. Fixed forever;
// persisted indexes depend on it. Test vectors live in docs/fingerprint.md.

constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fmix64(std::uint64_t k) noexcept {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

constexpr std::uint64_t hash_bytes(std::string_view bytes) noexcept {
    std::uint64_t h = kFnvOffsetBasis;
    for (char c : bytes) {
        h ^= static_cast<std::uint8_t>(c);
        h *= kFnvPrime;
    }
    return fmix64(h);
}

/// Hash of the 8-byte little-endian encoding of `value`.
constexpr std::uint64_t hash_u64(std::uint64_t value) noexcept {
    std::uint64_t h = kFnvOffsetBasis;
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xffU;
        h *= kFnvPrime;
    }
    return fmix64(h);
}

} // namespace castsel
