#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

// Deterministic randomness helpers. Distribution code lives here instead of
// <random>'s distributions so that generated corpora are reproducible across
// standard library implementations, not just across runs.

namespace finprog {

/// Unbiased uniform draw from [0, n) via rejection sampling.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % static_cast<std::uint64_t>(n);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return static_cast<std::size_t>(x % static_cast<std::uint64_t>(n));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle_in_place(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

/// Mixes a global seed with an example id so parallel per-example generation
/// stays independent of scheduling. FNV-1a over the id, then splitmix64.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view example_id) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : example_id) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::uint64_t z = h + 0x9e3779b97f4a7c15ull * (global_seed + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace finprog
