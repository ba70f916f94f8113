#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "market_rounds/core.hpp"

namespace market_rounds {

/// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed for the stream owned by (seed, a, b), e.g. (run seed, player, round).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Deterministic generator. std::mt19937_64 output is fixed by the standard; bounded draws
/// are done here rather than through std::uniform_int_distribution, whose algorithm is
/// implementation-defined, so runs replay identically across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  const T& pick(std::span<const T> values) {
    return values[static_cast<std::size_t>(below(values.size()))];
  }

  /// Uniformly random k-subset of `population`, returned sorted (seeded partial shuffle).
  ItemSet sample(std::span<const ItemId> population, std::size_t k);
  /// Uniformly random k-subset of [0, n), sorted.
  ItemSet sample_range(std::uint32_t n, std::size_t k);

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace market_rounds
