#pragma once

#include <cstdint>
#include <random>

namespace relik {

using Rng = std::mt19937_64;

/// Seed used whenever the caller does not pass one. Never derived from time.
inline constexpr std::uint64_t kDefaultSeed = 20240521ULL;

/// SplitMix64 finalizer; a bijection on 64-bit words with good avalanche.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from (global seed, work item, stream tag):
///   mix(g, i, s) = splitmix64(splitmix64(splitmix64(g) ^ i) ^ s)
/// Work items index triples, subgraphs, repetitions, ... so results never
/// depend on which thread handled which item.
constexpr std::uint64_t derive_seed(std::uint64_t global, std::uint64_t item,
                                    std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(splitmix64(global) ^ item) ^ stream);
}

/// Uniform integer in [0, n). n must be positive. Rejection on the top
/// residue keeps it exactly uniform and identical across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool coin_flip(Rng& rng) { return (rng() >> 63) != 0; }

}  // namespace relik
