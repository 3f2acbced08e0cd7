#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace slotex {

using Rng = std::mt19937_64;

// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed of run `run_index` in a batch: mix64(base ^ mix64(run_index)).
// Depends only on (base, run_index), so adding runs never perturbs earlier ones.
constexpr std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t run_index) {
  return mix64(base_seed ^ mix64(run_index));
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace slotex
