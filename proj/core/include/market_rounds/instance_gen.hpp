#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "market_rounds/core.hpp"

namespace market_rounds {

/// Construction secrets that travel with a generated instance. Protocols never read these.
struct PlantedMeta {
  Allocation planted;
  Rational planted_welfare;
  std::map<std::string, ItemSet> sets;                   // e.g. "U", "T", "C"
  std::map<std::string, std::vector<ItemSet>> set_lists; // e.g. "P" (petals), "T_i"
  std::map<std::string, std::int64_t> scalars;           // e.g. "hidden"

  friend bool operator==(const PlantedMeta&, const PlantedMeta&) = default;
};

struct MatchingCase {
  MatchingInstance instance;
  PlantedMeta meta;
};

struct BinaryXosCase {
  std::vector<BinaryXOSValuation> players;
  PlantedMeta meta;
};

struct XosCase {
  std::vector<XOSValuation> players;
  PlantedMeta meta;
};

struct HiddenItemCase {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  ItemSet alice;  // T, |T| = 2k
  ItemSet bob;    // S, |S| = k+1, exactly one element outside T
  ItemId hidden = 0;

  friend bool operator==(const HiddenItemCase&, const HiddenItemCase&) = default;
};

struct SetSeekingCase {
  std::uint32_t k = 0;
  std::uint32_t x = 0;               // k^2 + k^3 items
  std::vector<ItemSet> family;       // F, keeper's input
  ItemSet petal;                     // P, seeker's input
  ItemSet special;                   // T_P
  std::size_t special_index = 0;     // position of T_P inside F

  friend bool operator==(const SetSeekingCase&, const SetSeekingCase&) = default;
};

/// All players share one random w-set U of items.
MatchingCase gen_w_random(std::uint32_t n, std::uint32_t w, std::uint64_t seed);

/// n = k^2; a random 2k-set T; each S_i = (random k-subset of T) + (one random item outside T).
MatchingCase gen_matching_hard(std::uint32_t n, std::uint64_t seed);

/// Each player demands an independent uniformly random d-subset of the items.
MatchingCase gen_uniform_matching(std::uint32_t n, std::uint32_t degree, std::uint64_t seed);

/// Alice gets a random 2k-set T; Bob gets k random items of T plus one random item outside T.
HiddenItemCase gen_hidden_item(std::uint32_t n, std::uint32_t k, std::uint64_t seed);

/// Center/petal distribution: n = k^3 players, m = k^3 + k^4 items, a center C of k^3 items,
/// per-player petals P_i of k^2 items outside C, T_i a k-subset of P_i, plus t_sets - 1 decoy
/// k-subsets of C ∪ P_i. Valuations max_{T in F_i} |T ∩ S| with mu = 1.
BinaryXosCase gen_xos_hard(std::uint32_t k, std::uint32_t t_sets, std::uint64_t seed);

/// Two-party set seeking on x = k^2 + k^3 items.
SetSeekingCase gen_set_seeking(std::uint32_t k, std::uint32_t t_sets, std::uint64_t seed);

/// Disjoint planted bundles of size t for the first n_active players (the rest get none); every
/// active player has one clause equal to its planted bundle plus extra_clauses random t-sets.
/// n_players defaults to n_active when 0.
BinaryXosCase gen_planted_t_restricted(std::uint32_t n_active, std::uint32_t t, std::uint32_t m,
                                       std::uint32_t extra_clauses, std::uint64_t seed, std::uint32_t n_players = 0);

/// Random XOS players: each clause keeps each item with probability 1/2 and gives it an
/// integer value in [1, max_value].
XosCase gen_random_xos(std::uint32_t n, std::uint32_t m, std::uint32_t clauses, std::uint32_t max_value,
                       std::uint64_t seed);

}  // namespace market_rounds
