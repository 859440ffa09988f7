#include "lod/rng.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace lod {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x6c6f6475u};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t index)
    : seed_(seed), index_(index), engine_(make_engine(seed, index)) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::exponential(double rate) {
  return -std::log(uniform_open()) / rate;
}

__extension__ using uint128 = unsigned __int128;

std::uint64_t RngStream::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection of the biased low zone.
  std::uint64_t x = engine_();
  uint128 m = static_cast<uint128>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      x = engine_();
      m = static_cast<uint128>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() { return normal_(engine_); }

std::uint64_t RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

std::uint64_t seed_from_environment(std::uint64_t fallback) {
  if (const char* env = std::getenv("LOD_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      return fallback;
    }
  }
  return fallback;
}

}  // namespace lod
