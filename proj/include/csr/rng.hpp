#pragma once

#include <cstdint>
#include <random>

namespace csr {

// Deterministic helpers on top of mt19937_64. std::uniform_int_distribution is
// implementation-defined, so seeded runs would not be reproducible across
// standard libraries if we used it directly.

// Derives independent sub-seeds from a base seed (splitmix64 step).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform integer in [0, n), n >= 1. Rejection sampling keeps it unbiased.
inline std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Uniform double in [0, 1).
inline double rng_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace csr
