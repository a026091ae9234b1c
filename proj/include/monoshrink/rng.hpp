#ifndef MONOSHRINK_RNG_HPP
#define MONOSHRINK_RNG_HPP

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace monoshrink {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for sub-stream `stream` of `seed`. Distinct (seed, stream) pairs give
/// unrelated engines regardless of evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

using Engine = std::mt19937_64;

/// Fisher-Yates permutation of 0..n-1. Uses the engine's raw output so the
/// result does not depend on the standard library's distribution algorithms.
inline std::vector<std::size_t> permutation(std::size_t n, Engine& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

}  // namespace monoshrink

#endif  // MONOSHRINK_RNG_HPP
