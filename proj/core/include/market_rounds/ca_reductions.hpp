#pragma once

#include <cstdint>
#include <vector>

#include "market_rounds/ca_protocols.hpp"
#include "market_rounds/core.hpp"
#include "market_rounds/transcript.hpp"

namespace market_rounds {

/// Keeps, per clause, the items valued in [mu, 2*mu); clauses that project to nothing are dropped.
BinaryXOSValuation mu_projection(const XOSValuation& v, const Rational& mu);

/// Levels MAX, MAX/2, ..., down to the first one <= MAX/(2m), where MAX is v(M) rounded down to
/// a power of two. Empty for the zero valuation. Sorted descending.
std::vector<Rational> projection_levels(const XOSValuation& v);

enum class InnerAlgorithm { Simultaneous, KRound };
const char* to_string(InnerAlgorithm inner);

struct PipelineConfig {
  InnerAlgorithm inner = InnerAlgorithm::Simultaneous;
  std::uint32_t k = 2;  // rounds, for the k-round inner algorithm
  ProxyMode mode = ProxyMode::Auto;
  std::size_t cap = kDefaultProxyCap;
};

/// One inner run on the projections at level mu with restriction size t.
struct PipelineCell {
  Rational mu;
  std::uint32_t t = 0;
  std::size_t bundle_size = 0;
  Rational welfare;
  bool greedy = false;
};

struct PipelineResult {
  Allocation allocation;
  Transcript transcript;
  Rational welfare;
  Rational chosen_mu;
  std::uint32_t chosen_t = 0;
  std::vector<PipelineCell> cells;
  bool any_greedy = false;
};

/// General XOS -> binary XOS (mu levels) -> t-restricted runs (t = 1, 2, 4, ... <= m); keeps the
/// run with the highest true welfare (ties: smaller t, then smaller mu).
PipelineResult run_xos_pipeline(std::span<const XOSValuation> players, const PipelineConfig& config);

struct TBin {
  std::uint32_t t = 0;
  Allocation truncated;
  Rational truncated_value;
  Rational bin_value;  // sum of v_i(O_i) over the chosen bin
};

/// Bins players by 2r > |O_i| >= r, picks the most valuable bin and truncates each of its
/// bundles to the t items worth most under that bundle's maximizing clause.
TBin best_t_bin(const Allocation& optimum, std::span<const XOSValuation> valuations);

}  // namespace market_rounds
