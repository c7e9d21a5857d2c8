#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cosmem {

// Deterministic RNG helpers. std::uniform_*_distribution and
// std::poisson_distribution are implementation-defined, so every draw the
// toolkit makes goes through the fixed mappings below; outputs depend only on
// the mt19937_64 stream, which the standard pins bit-for-bit.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Derives an independent substream for (seed, key), e.g. one stream per DIMM.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::string_view key) {
  return std::mt19937_64(splitmix64(seed ^ fnv1a64(key)));
}

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ index));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Multiply-shift; bias is < 2^-64 per draw.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(rng()) * n) >> 64);
}

// Box-Muller, one value per call (the sibling value is discarded to keep the
// stream position independent of call parity).
inline double normal(std::mt19937_64& rng, double mean = 0.0,
                     double stddev = 1.0) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  double z = std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * 3.14159265358979323846 * u2);
  return mean + stddev * z;
}

// Knuth's product method; large means are split into independent chunks so
// exp(-lambda) never underflows.
inline std::uint64_t poisson(std::mt19937_64& rng, double lambda) {
  std::uint64_t total = 0;
  while (lambda > 30.0) {
    double chunk = 30.0;
    double l = std::exp(-chunk);
    double p = 1.0;
    std::uint64_t k = 0;
    do {
      ++k;
      p *= uniform01(rng);
    } while (p > l);
    total += k - 1;
    lambda -= chunk;
  }
  if (lambda <= 0.0) return total;
  double l = std::exp(-lambda);
  double p = 1.0;
  std::uint64_t k = 0;
  do {
    ++k;
    p *= uniform01(rng);
  } while (p > l);
  return total + k - 1;
}

} // namespace cosmem
