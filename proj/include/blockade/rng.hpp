#pragma once

#include <cstdint>
#include <random>

namespace blockade {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent per-trial streams.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for trial `index` under `master`. Any trial can be replayed alone,
// and results do not depend on how trials are scheduled across threads.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// Uniform double in [0, 1) with 53 random bits. Used instead of
// std::uniform_real_distribution so streams are identical across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace blockade
