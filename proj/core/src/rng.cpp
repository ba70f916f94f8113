#include "market_rounds/rng.hpp"

#include <algorithm>
#include <numeric>

namespace market_rounds {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd1342543de82ef95ULL));
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("Rng::below requires a positive bound");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t x = engine_();
    if (x >= limit) return x % bound;
  }
}

ItemSet Rng::sample(std::span<const ItemId> population, std::size_t k) {
  if (k > population.size()) throw DomainError("cannot sample more items than the population holds");
  std::vector<ItemId> pool(population.begin(), population.end());
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

ItemSet Rng::sample_range(std::uint32_t n, std::size_t k) {
  std::vector<ItemId> all(n);
  std::iota(all.begin(), all.end(), ItemId{0});
  return sample(all, k);
}

}  // namespace market_rounds
