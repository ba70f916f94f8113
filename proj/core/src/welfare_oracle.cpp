#include "market_rounds/welfare_oracle.hpp"

#include <boost/integer/common_factor_rt.hpp>

namespace market_rounds {
namespace {

ItemSet mask_items(std::uint32_t mask) {
  ItemSet out;
  for (ItemId j = 0; mask != 0; ++j, mask >>= 1) {
    if (mask & 1U) out.push_back(j);
  }
  return out;
}

}  // namespace

WelfareOptimum optimal_welfare(std::span<const XOSValuation> valuations) {
  WelfareOptimum out;
  out.allocation = Allocation(valuations.size());
  if (valuations.empty()) return out;
  const auto m = valuations.front().m();
  for (const auto& v : valuations) {
    if (v.m() != m) throw ConfigError("all players must share one item universe");
  }
  if (m > kMaxOracleItems) {
    throw ConfigError("exact welfare oracle supports at most " + std::to_string(kMaxOracleItems) + " items");
  }

  std::int64_t scale = 1;
  for (const auto& v : valuations) {
    for (const auto& clause : v.clauses()) {
      for (const auto& [item, value] : clause.entries()) scale = boost::integer::lcm(scale, value.denominator());
    }
  }

  const std::uint32_t full = (1U << m) - 1;
  const std::size_t states = std::size_t{1} << m;
  const auto n = valuations.size();

  // value[S] of the current player, as an integer multiple of 1/scale.
  std::vector<std::int64_t> value(states);
  std::vector<std::int64_t> best(states, 0), next(states);
  std::vector<std::vector<std::uint32_t>> choice(n, std::vector<std::uint32_t>(states, 0));

  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::vector<std::int64_t>> per_item;
    for (const auto& clause : valuations[i].clauses()) {
      std::vector<std::int64_t> row(m, 0);
      for (const auto& [item, v] : clause.entries()) row[item] = v.numerator() * (scale / v.denominator());
      per_item.push_back(std::move(row));
    }
    for (std::uint32_t s = 0; s <= full; ++s) {
      std::int64_t top = 0;
      for (const auto& row : per_item) {
        std::int64_t sum = 0;
        for (std::uint32_t rest = s; rest != 0; rest &= rest - 1) sum += row[static_cast<unsigned>(__builtin_ctz(rest))];
        top = std::max(top, sum);
      }
      value[s] = top;
    }
    // next[S] = max over T ⊆ S of best[S \ T] + value[T]; T = 0 first so ties keep items unassigned.
    for (std::uint32_t s = 0; s <= full; ++s) {
      std::int64_t top = best[s];
      std::uint32_t pick = 0;
      for (std::uint32_t t = s; t != 0; t = (t - 1) & s) {
        const auto candidate = best[s ^ t] + value[t];
        if (candidate > top) {
          top = candidate;
          pick = t;
        }
      }
      next[s] = top;
      choice[i][s] = pick;
    }
    best.swap(next);
  }

  out.value = Rational(best[full], scale);
  std::uint32_t left = full;
  for (std::size_t i = n; i-- > 0;) {
    const auto t = choice[i][left];
    out.allocation.bundles[i] = mask_items(t);
    left ^= t;
  }
  return out;
}

WelfareOptimum optimal_welfare(std::span<const BinaryXOSValuation> valuations) {
  std::vector<XOSValuation> xos;
  xos.reserve(valuations.size());
  for (const auto& v : valuations) xos.push_back(v.to_xos());
  return optimal_welfare(xos);
}

}  // namespace market_rounds
