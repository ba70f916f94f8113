#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "market_rounds/core.hpp"
#include "market_rounds/matching_oracle.hpp"
#include "market_rounds/transcript.hpp"

namespace market_rounds {

/// Items of S_i whose price is below 1 and minimal among those; empty if none is below 1.
ItemSet demand_set(std::span<const ItemId> wanted, const PriceVector& prices);

/// q such that delta = 1/q. Throws ConfigError unless 0 < delta < 1 and delta is a unit fraction.
std::uint32_t unit_fraction_denominator(const Rational& delta);

/// ceil(2 log2 n / delta^2), at least 1.
std::uint64_t default_auction_round_budget(std::uint32_t n, std::uint32_t q);

struct MatchingRun {
  Matching matching;
  Transcript transcript;
};

/// One round; each player writes up to floor(l / index_bits(n)) of its lowest-index neighbors
/// and the referee outputs a maximum matching of the reported subgraph.
MatchingRun simultaneous_deterministic_matching(const MatchingInstance& inst, std::uint64_t bit_budget);

enum class StopReason { AllSatisfied, RoundBudget };
const char* to_string(StopReason reason);

struct AuctionConfig {
  Rational delta{1, 4};
  /// Round cap; defaults to default_auction_round_budget when unset.
  std::optional<std::uint64_t> max_rounds;
  /// Keep a per-round snapshot of prices and commitments (for invariant checks).
  bool record_history = false;
};

struct AuctionSnapshot {
  std::vector<std::uint32_t> ticks;
  std::vector<std::optional<ItemId>> committed;  // indexed by player
};

struct AuctionResult {
  Matching matching;
  Transcript transcript;
  PriceVector prices{0, 1};
  std::size_t satisfied_count = 0;
  std::uint64_t rounds_used = 0;
  std::uint64_t round_budget = 0;
  StopReason stop = StopReason::RoundBudget;
  std::vector<AuctionSnapshot> history;  // state after each round, when recorded
};

/// Randomized ascending auction: each uncommitted player reports a uniformly random item of its
/// demand set; an ascending-id sweep gives each reported item to its first reporter this round,
/// raises its price by delta and releases the previous holder.
AuctionResult auction_matching(const MatchingInstance& inst, const AuctionConfig& config, std::uint64_t seed);

struct KRoundMatchingResult {
  Matching matching;
  Transcript transcript;
  std::vector<std::vector<PlayerId>> active;  // N_r for each executed round
  std::vector<ItemSet> available;             // U_r for each executed round
};

/// k rounds; every unallocated player reports a uniformly random neighbor still available, and
/// an ascending-id sweep grants each reported item to its first reporter.
KRoundMatchingResult k_round_matching(const MatchingInstance& inst, std::uint32_t k, std::uint64_t seed);

struct ExactMatchingResult {
  Matching matching;
  Transcript transcript;
  std::size_t auction_size = 0;
  std::uint64_t auction_rounds = 0;
  std::size_t augmentations = 0;
  std::size_t searches = 0;
};

/// Auction with delta = 1/ceil(sqrt n), then blackboard breadth-first augmenting-path searches
/// until none exists. Output is a maximum matching.
ExactMatchingResult exact_matching_protocol(const MatchingInstance& inst, std::uint64_t seed);

}  // namespace market_rounds
