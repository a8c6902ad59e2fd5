#pragma once
// Counter-based pseudo-random stream (splitmix64 finalizer). Draw i of
// stream `seed` is a pure function of (seed, i), so parallel consumers see
// identical values no matter how the indices are scheduled across threads.

#include <cstdint>

namespace skewshift {

inline std::uint64_t counter_mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t counter_rng(std::uint64_t seed, std::uint64_t index) {
  return counter_mix(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

// Uniform double in [0,1) with 53 random bits.
inline double uniform01(std::uint64_t seed, std::uint64_t index) {
  return double(counter_rng(seed, index) >> 11) * 0x1.0p-53;
}

}  // namespace skewshift
