#pragma once

#include <cstdint>
#include <span>

#include "market_rounds/core.hpp"

namespace market_rounds {

struct WelfareOptimum {
  Rational value;
  Allocation allocation;
};

/// Largest universe the exact oracle accepts; the subset DP costs n * 3^m steps.
inline constexpr std::uint32_t kMaxOracleItems = 16;

/// Exact maximum welfare by dynamic programming over item subsets. Values are scaled to integers
/// by the common denominator, so the optimum is exact. Throws ConfigError when m > kMaxOracleItems.
WelfareOptimum optimal_welfare(std::span<const XOSValuation> valuations);
WelfareOptimum optimal_welfare(std::span<const BinaryXOSValuation> valuations);

}  // namespace market_rounds
