#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ocf {

using Rng = std::mt19937_64;

// Well-known stream ids for per-trial randomness. Every trial derives one
// independent generator per stream so that, e.g., two policies evaluated on
// the same trial index see the same arrival order and the same planted items.
enum class Stream : std::uint64_t {
  kRewardModel = 1,
  kArrivals = 2,
  kPolicy = 3,
  kOracle = 4,
  kEvents = 5,
  kGraph = 6,
};

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based seed derivation: the seed for (master, trial, stream) does not
/// depend on how trials are scheduled across workers.
constexpr std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t trial,
                                   Stream stream) {
  return Mix64(Mix64(Mix64(master) ^ trial) ^
               static_cast<std::uint64_t>(stream));
}

inline Rng MakeRng(std::uint64_t master, std::uint64_t trial, Stream stream) {
  return Rng(DeriveSeed(master, trial, stream));
}

inline double Uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t UniformIndex(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Moves a uniformly random k-subset of `pool` (in random order) to its front
/// via a partial Fisher-Yates shuffle. Returns min(k, pool.size()).
template <class T>
std::size_t PartialShuffle(std::span<T> pool, std::size_t k, Rng& rng) {
  const std::size_t n = pool.size();
  if (k > n) k = n;
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t pick = j + UniformIndex(rng, n - j);
    std::swap(pool[j], pool[pick]);
  }
  return k;
}

/// Sequential weighted sampling without replacement: at each step an index is
/// drawn with probability proportional to its weight among those not yet
/// drawn. Zero-weight entries are never drawn. Returns drawn indices in order.
std::vector<std::size_t> WeightedSampleWithoutReplacement(
    std::span<const double> weights, std::size_t k, Rng& rng);

}  // namespace ocf
