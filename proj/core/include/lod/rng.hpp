#pragma once

#include <cstdint>
#include <random>

namespace lod {

/// Reproducible random stream addressed by (master seed, stream index).
///
/// Each replicate of a Monte Carlo experiment owns the stream with its
/// replicate number as index, so results do not depend on how replicates
/// are scheduled across threads. Uniform, exponential and bounded-integer
/// draws are computed here from raw engine output and are therefore
/// identical across standard library implementations.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t index() const noexcept { return index_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  /// Exponential with the given rate (> 0).
  double exponential(double rate);
  /// Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  double normal();
  std::uint64_t poisson(double mean);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Seed fallback chain used by the tools: explicit value, then LOD_SEED,
/// then a fixed default.
std::uint64_t seed_from_environment(std::uint64_t fallback);

}  // namespace lod
