#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace brave {

// All randomness in the toolkit flows through std::mt19937_64 plus the
// helpers below. The engine's output sequence is pinned by the standard and
// the helpers avoid std distributions, whose draws differ across standard
// library implementations, so seeded results are reproducible everywhere.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  return std::mt19937_64(splitmix64(s));
}

// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n) {
  assert(n > 0);
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

// Uniform double in [0, 1) with 53 random bits.
inline double rng_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace brave
