#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace tvpk {

//! SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives a substream seed from a parent seed and a path of indices.
///
/// The result depends only on its arguments, so a replication, bootstrap draw
/// or mixture component always gets the same stream no matter which worker
/// thread evaluates it or in which order.
inline std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(parent);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632BE59BD9B4E019ULL));
  return s;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Engine(seq);
}

//! Standard normal sampler independent of std::normal_distribution's caching.
class StdNormal {
public:
  explicit StdNormal(std::uint64_t seed) : engine_(make_engine(seed)) {}

  double operator()() { return dist_(engine_); }
  Engine& engine() noexcept { return engine_; }

private:
  Engine engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

} // namespace tvpk
