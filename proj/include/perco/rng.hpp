#pragma once

#include <cstdint>

namespace perco::rng {

// All randomness is a pure function of (seed, purpose tag, index): the same
// (seed, index) pair always yields the same value on every platform and for
// every thread count. Distinct purpose tags keep consumer streams independent,
// so adding a new consumer never perturbs existing ones.

inline constexpr std::uint64_t TAG_EDGE = 0xe49a10b6f33cd91bull;       // edge labels
inline constexpr std::uint64_t TAG_PICK = 0x5bf0f0d3a1c4f7a3ull;       // partition picks
inline constexpr std::uint64_t TAG_SUBSAMPLE = 0x9d2c5680a7b41f45ull;  // retention coin flips
inline constexpr std::uint64_t TAG_GENERIC = 0x243f6a8885a308d3ull;

// splitmix64 finalizer
inline std::uint64_t avalanche(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return avalanche(a ^ avalanche(b));
}

// 53-bit uniform in [0,1)
inline double to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// uniform draw in [0,n) by multiplicative range reduction (bias <= n / 2^64)
inline std::uint64_t bounded(std::uint64_t h, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(h) * n) >> 64);
}

}  // namespace perco::rng
