#include "market_rounds/matching_protocols.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "market_rounds/rng.hpp"

namespace market_rounds {

ItemSet demand_set(std::span<const ItemId> wanted, const PriceVector& prices) {
  ItemSet demand;
  std::uint32_t best = prices.q();
  for (ItemId j : wanted) {
    const auto t = prices.ticks(j);
    if (t >= prices.q()) continue;
    if (t < best) {
      best = t;
      demand.clear();
    }
    if (t == best) demand.push_back(j);
  }
  return demand;
}

std::uint32_t unit_fraction_denominator(const Rational& delta) {
  if (delta <= 0 || delta >= 1 || delta.numerator() != 1) {
    throw ConfigError("delta must be a unit fraction 1/q with q >= 2, got " + to_string(delta));
  }
  return static_cast<std::uint32_t>(delta.denominator());
}

std::uint64_t default_auction_round_budget(std::uint32_t n, std::uint32_t q) {
  if (n <= 1) return 1;
  const long double rounds = 2.0L * std::log2(static_cast<long double>(n)) * q * q;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(rounds - 1e-12L)));
}

const char* to_string(StopReason reason) {
  return reason == StopReason::AllSatisfied ? "all-satisfied" : "round-budget";
}

MatchingRun simultaneous_deterministic_matching(const MatchingInstance& inst, std::uint64_t bit_budget) {
  const auto width = index_bits(inst.n());
  if (bit_budget < width) {
    throw ConfigError("bit budget " + std::to_string(bit_budget) + " cannot encode one index of " +
                      std::to_string(width) + " bits");
  }
  const auto per_player = bit_budget / width;

  MatchingRun run{Matching(inst.n()), Transcript(inst.n())};
  run.transcript.begin_round();
  std::vector<ItemSet> reported(inst.n());
  for (PlayerId i = 0; i < inst.n(); ++i) {
    const auto& s = inst.neighbors(i);
    const auto count = std::min<std::uint64_t>(s.size(), per_player);
    reported[i].assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(count));
    for (ItemId j : reported[i]) run.transcript.post_item(i, j);
  }
  run.matching = max_matching(MatchingInstance(inst.n(), std::move(reported)));
  return run;
}

namespace {

constexpr auto kNoPlayer = static_cast<PlayerId>(-1);

struct Commitments {
  std::vector<std::optional<ItemId>> item_of;
  std::vector<PlayerId> holder;

  explicit Commitments(std::uint32_t n) : item_of(n), holder(n, kNoPlayer) {}

  void commit(PlayerId i, ItemId j) {
    if (holder[j] != kNoPlayer) item_of[holder[j]].reset();
    if (item_of[i]) holder[*item_of[i]] = kNoPlayer;
    holder[j] = i;
    item_of[i] = j;
  }
};

bool satisfied(const MatchingInstance& inst, const Commitments& c, const PriceVector& prices, PlayerId i) {
  return c.item_of[i].has_value() || demand_set(inst.neighbors(i), prices).empty();
}

}  // namespace

AuctionResult auction_matching(const MatchingInstance& inst, const AuctionConfig& config, std::uint64_t seed) {
  const auto q = unit_fraction_denominator(config.delta);
  const auto n = inst.n();

  AuctionResult result;
  result.transcript = Transcript(n);
  result.prices = PriceVector(n, q);
  result.round_budget = config.max_rounds.value_or(default_auction_round_budget(n, q));
  if (result.round_budget == 0) throw ConfigError("auction needs a round budget of at least 1");

  Commitments c(n);
  auto& prices = result.prices;

  auto all_satisfied = [&] {
    for (PlayerId i = 0; i < n; ++i) {
      if (!satisfied(inst, c, prices, i)) return false;
    }
    return true;
  };

  std::vector<std::optional<ItemId>> reports(n);
  std::vector<bool> taken(n, false);
  for (std::uint64_t round = 1; round <= result.round_budget; ++round) {
    if (all_satisfied()) break;
    result.transcript.begin_round();

    // Messages depend only on the round-start state and the player's own stream.
    for (PlayerId i = 0; i < n; ++i) {
      reports[i].reset();
      if (c.item_of[i]) continue;
      const auto demand = demand_set(inst.neighbors(i), prices);
      if (demand.empty()) continue;
      Rng rng(stream_seed(seed, i, round));
      reports[i] = rng.pick(std::span<const ItemId>(demand));
      result.transcript.post_item(i, *reports[i]);
    }

    std::fill(taken.begin(), taken.end(), false);
    for (PlayerId i = 0; i < n; ++i) {
      if (!reports[i]) continue;
      const auto j = *reports[i];
      if (taken[j]) continue;
      taken[j] = true;
      c.commit(i, j);
      prices.raise(j);
    }
    ++result.rounds_used;

    if (config.record_history) {
      AuctionSnapshot snap;
      snap.ticks.reserve(n);
      for (ItemId j = 0; j < n; ++j) snap.ticks.push_back(prices.ticks(j));
      snap.committed = c.item_of;
      result.history.push_back(std::move(snap));
    }
  }

  result.stop = all_satisfied() ? StopReason::AllSatisfied : StopReason::RoundBudget;
  for (PlayerId i = 0; i < n; ++i) result.satisfied_count += satisfied(inst, c, prices, i);
  result.matching.item_of = c.item_of;
  return result;
}

KRoundMatchingResult k_round_matching(const MatchingInstance& inst, std::uint32_t k, std::uint64_t seed) {
  const auto n = inst.n();
  std::uint32_t max_k = 1;
  while ((std::uint64_t{1} << (max_k + 1)) <= n) ++max_k;  // floor(log2 n), at least 1
  if (k < 1 || k > max_k) {
    throw ConfigError("k must lie in [1, " + std::to_string(max_k) + "] for n=" + std::to_string(n));
  }

  KRoundMatchingResult result;
  result.matching = Matching(n);
  result.transcript = Transcript(n);

  std::vector<bool> available(n, true);
  std::vector<std::optional<ItemId>> reports(n);
  for (std::uint32_t round = 1; round <= k; ++round) {
    std::vector<PlayerId> active;
    ItemSet open;
    for (PlayerId i = 0; i < n; ++i) {
      if (!result.matching.item_of[i]) active.push_back(i);
    }
    for (ItemId j = 0; j < n; ++j) {
      if (available[j]) open.push_back(j);
    }

    bool any = false;
    for (PlayerId i : active) {
      reports[i].reset();
      ItemSet options;
      for (ItemId j : inst.neighbors(i)) {
        if (available[j]) options.push_back(j);
      }
      if (options.empty()) continue;
      if (!any) result.transcript.begin_round();
      any = true;
      Rng rng(stream_seed(seed, i, round));
      reports[i] = rng.pick(std::span<const ItemId>(options));
      result.transcript.post_item(i, *reports[i]);
    }
    if (!any) break;

    result.active.push_back(std::move(active));
    result.available.push_back(std::move(open));
    for (PlayerId i : result.active.back()) {
      if (!reports[i] || !available[*reports[i]]) continue;
      available[*reports[i]] = false;
      result.matching.item_of[i] = *reports[i];
    }
  }
  return result;
}

namespace {

// One breadth-first augmenting-path search written on the blackboard. Each dequeued player
// writes one bundle: a free neighbor if it has one (ending the search), otherwise the
// allocated neighbors nobody has written yet. Every item is written at most once.
bool blackboard_augment(const MatchingInstance& inst, Matching& matching, Transcript& transcript) {
  const auto n = inst.n();
  auto owner = matching.owners(n);
  std::vector<bool> written(n, false);
  std::vector<PlayerId> discoverer(n, kNoPlayer);
  std::deque<PlayerId> queue;
  for (PlayerId i = 0; i < n; ++i) {
    if (!matching.item_of[i]) queue.push_back(i);
  }

  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    transcript.begin_round();

    std::optional<ItemId> free_item;
    for (ItemId j : inst.neighbors(i)) {
      if (!owner[j]) {
        free_item = j;
        break;
      }
    }
    if (free_item) {
      const ItemId one[] = {*free_item};
      transcript.post_bundle(i, one);
      auto player = i;
      auto item = *free_item;
      for (;;) {
        const auto previous = matching.item_of[player];
        matching.item_of[player] = item;
        if (!previous) break;
        item = *previous;
        player = discoverer[item];
      }
      return true;
    }

    ItemSet fresh;
    for (ItemId j : inst.neighbors(i)) {
      if (written[j]) continue;
      written[j] = true;
      discoverer[j] = i;
      fresh.push_back(j);
      queue.push_back(*owner[j]);
    }
    transcript.post_bundle(i, fresh);
  }
  return false;
}

}  // namespace

ExactMatchingResult exact_matching_protocol(const MatchingInstance& inst, std::uint64_t seed) {
  const auto n = inst.n();
  ExactMatchingResult result;
  if (n == 0) return result;

  std::uint32_t root = 1;
  while (root * root < n) ++root;
  AuctionConfig config;
  config.delta = Rational(1, std::max<std::uint32_t>(2, root));
  auto auction = auction_matching(inst, config, seed);

  result.matching = std::move(auction.matching);
  result.transcript = std::move(auction.transcript);
  result.auction_size = result.matching.size();
  result.auction_rounds = auction.rounds_used;

  for (;;) {
    ++result.searches;
    if (!blackboard_augment(inst, result.matching, result.transcript)) break;
    ++result.augmentations;
  }
  return result;
}

}  // namespace market_rounds
