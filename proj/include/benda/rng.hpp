#pragma once

#include <cstdint>

namespace benda::rng {

// Counter-based uniform generator built on the splitmix64 output function.
// draw k of a stream keyed by `seed` is
//
//   z  = seed + (k + 1) * 0x9E3779B97F4A7C15   (the splitmix64 increment)
//   z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
//   z ^= z >> 27;  z *= 0x94D049BB133111EB
//   z ^= z >> 31
//   u  = (z >> 53 high bits) * 2^-53           in [0, 1)
//
// which is exactly the k-th output of sequential splitmix64 seeded with
// `seed`. Being a pure function of (seed, counter) it needs no state, so a
// consumer that derives the counter from (step, sample index) reproduces the
// same draws regardless of evaluation order, platform, or thread count.

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t draw_u64(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed + (counter + 1) * 0x9E3779B97F4A7C15ull);
}

inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(draw_u64(seed, counter) >> 11) * 0x1.0p-53;
}

// Uniform on [1 - eps, 1 + eps], the multiplicative observation noise.
inline double noise_factor(std::uint64_t seed, std::uint64_t counter, double eps) {
  return 1.0 + eps * (2.0 * uniform01(seed, counter) - 1.0);
}

}  // namespace benda::rng
