#include "market_rounds/instance_gen.hpp"

#include <numeric>

#include "market_rounds/ca_protocols.hpp"
#include "market_rounds/rng.hpp"

namespace market_rounds {
namespace {

ItemSet range_set(std::uint32_t n) {
  ItemSet all(n);
  std::iota(all.begin(), all.end(), ItemId{0});
  return all;
}

std::uint32_t exact_sqrt(std::uint32_t n) {
  std::uint32_t r = 0;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Independent streams per generator and per role keep draws stable if one role changes.
Rng role_rng(std::uint64_t seed, std::uint64_t generator, std::uint64_t role) {
  return Rng(stream_seed(seed, generator, role));
}

enum Generator : std::uint64_t { kWRandom = 1, kMatchHard, kUniform, kHidden, kXosHard, kSetSeek, kPlanted, kRandomXos };

}  // namespace

MatchingCase gen_w_random(std::uint32_t n, std::uint32_t w, std::uint64_t seed) {
  if (w < 1 || w > n) throw ConfigError("w-random needs 1 <= w <= n");
  auto rng = role_rng(seed, kWRandom, 0);
  const auto u = rng.sample_range(n, w);

  MatchingCase out{MatchingInstance(n, std::vector<ItemSet>(n, u)), {}};
  out.meta.sets["U"] = u;
  out.meta.planted = Allocation(n);
  for (std::uint32_t i = 0; i < w; ++i) out.meta.planted.bundles[i] = {u[i]};
  out.meta.planted_welfare = Rational(w);
  return out;
}

MatchingCase gen_matching_hard(std::uint32_t n, std::uint64_t seed) {
  const auto k = exact_sqrt(n);
  if (k * k != n) throw ConfigError("match-hard needs n to be a perfect square, got " + std::to_string(n));
  if (2 * k >= n) throw ConfigError("match-hard needs 2*sqrt(n) < n so that items outside T exist");

  auto rng = role_rng(seed, kMatchHard, 0);
  const auto t = rng.sample_range(n, 2 * k);
  const auto outside = set_difference(range_set(n), t);

  std::vector<ItemSet> sets(n);
  std::vector<ItemSet> extras(n);
  for (PlayerId i = 0; i < n; ++i) {
    auto player_rng = role_rng(seed, kMatchHard, 1 + i);
    auto s = player_rng.sample(t, k);
    const auto extra = player_rng.pick(std::span<const ItemId>(outside));
    s.push_back(extra);
    sets[i] = make_item_set(std::move(s));
    extras[i] = {extra};
  }

  MatchingCase out{MatchingInstance(n, std::move(sets)), {}};
  out.meta.sets["T"] = t;
  out.meta.set_lists["outside_item"] = std::move(extras);
  out.meta.planted = Allocation(n);
  out.meta.planted_welfare = Rational(0);
  return out;
}

MatchingCase gen_uniform_matching(std::uint32_t n, std::uint32_t degree, std::uint64_t seed) {
  if (degree > n) throw ConfigError("degree cannot exceed n");
  std::vector<ItemSet> sets(n);
  for (PlayerId i = 0; i < n; ++i) sets[i] = role_rng(seed, kUniform, i).sample_range(n, degree);
  MatchingCase out{MatchingInstance(n, std::move(sets)), {}};
  out.meta.planted = Allocation(n);
  out.meta.planted_welfare = Rational(0);
  return out;
}

HiddenItemCase gen_hidden_item(std::uint32_t n, std::uint32_t k, std::uint64_t seed) {
  if (k < 1 || 2 * static_cast<std::uint64_t>(k) >= n) {
    throw ConfigError("hidden-item needs k >= 1 and 2k < n");
  }
  auto rng = role_rng(seed, kHidden, 0);
  HiddenItemCase out;
  out.n = n;
  out.k = k;
  out.alice = rng.sample_range(n, 2 * k);
  const auto outside = set_difference(range_set(n), out.alice);
  auto bob = rng.sample(out.alice, k);
  out.hidden = rng.pick(std::span<const ItemId>(outside));
  bob.push_back(out.hidden);
  out.bob = make_item_set(std::move(bob));
  return out;
}

BinaryXosCase gen_xos_hard(std::uint32_t k, std::uint32_t t_sets, std::uint64_t seed) {
  if (k < 2) throw ConfigError("xos-hard needs k >= 2");
  if (t_sets < 2) throw ConfigError("xos-hard needs t_sets >= 2");
  const std::uint32_t k2 = k * k;
  const std::uint32_t k3 = k2 * k;
  const std::uint32_t n = k3;
  const std::uint32_t m = k3 + k3 * k;

  auto rng = role_rng(seed, kXosHard, 0);
  const auto center = rng.sample_range(m, k3);
  const auto outside = set_difference(range_set(m), center);

  BinaryXosCase out;
  out.meta.sets["C"] = center;
  auto& petals = out.meta.set_lists["P"];
  auto& targets = out.meta.set_lists["T_i"];
  for (PlayerId i = 0; i < n; ++i) {
    auto player_rng = role_rng(seed, kXosHard, 1 + i);
    auto petal = player_rng.sample(outside, k2);
    auto target = player_rng.sample(petal, k);
    const auto pool = set_union(center, petal);
    std::vector<ItemSet> family{target};
    for (std::uint32_t s = 1; s < t_sets; ++s) family.push_back(player_rng.sample(pool, k));
    out.players.emplace_back(m, Rational(1), std::move(family));
    petals.push_back(std::move(petal));
    targets.push_back(std::move(target));
  }

  // Each item of the union of the T_i goes to the lowest-id player whose T_i holds it.
  out.meta.planted = Allocation(n);
  std::vector<bool> used(m, false);
  for (PlayerId i = 0; i < n; ++i) {
    for (ItemId j : targets[i]) {
      if (used[j]) continue;
      used[j] = true;
      out.meta.planted.bundles[i].push_back(j);
    }
  }
  out.meta.planted_welfare = welfare(out.meta.planted, out.players);
  return out;
}

SetSeekingCase gen_set_seeking(std::uint32_t k, std::uint32_t t_sets, std::uint64_t seed) {
  if (k < 1) throw ConfigError("set-seeking needs k >= 1");
  if (t_sets < 2) throw ConfigError("set-seeking needs t_sets >= 2");
  auto rng = role_rng(seed, kSetSeek, 0);
  SetSeekingCase out;
  out.k = k;
  out.x = k * k + k * k * k;
  out.petal = rng.sample_range(out.x, k * k);
  out.special = rng.sample(out.petal, k);
  out.special_index = static_cast<std::size_t>(rng.below(t_sets));
  for (std::uint32_t s = 0; s < t_sets; ++s) {
    out.family.push_back(s == out.special_index ? out.special : rng.sample_range(out.x, k));
  }
  return out;
}

BinaryXosCase gen_planted_t_restricted(std::uint32_t n_active, std::uint32_t t, std::uint32_t m,
                                       std::uint32_t extra_clauses, std::uint64_t seed, std::uint32_t n_players) {
  if (!is_power_of_two(t)) throw ConfigError("planted-t needs t to be a power of two");
  if (static_cast<std::uint64_t>(n_active) * t > m) throw ConfigError("planted bundles exceed the item capacity");
  if (n_players == 0) n_players = n_active;
  if (n_players < n_active) throw ConfigError("n_players must be at least n_active");

  auto rng = role_rng(seed, kPlanted, 0);
  ItemSet order = range_set(m);
  // Partial shuffle picks n_active * t distinct items, split into consecutive bundles.
  for (std::size_t i = 0; i < static_cast<std::size_t>(n_active) * t; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(m - i));
    std::swap(order[i], order[j]);
  }

  BinaryXosCase out;
  out.meta.planted = Allocation(n_players);
  for (PlayerId i = 0; i < n_players; ++i) {
    auto player_rng = role_rng(seed, kPlanted, 1 + i);
    std::vector<ItemSet> clauses;
    if (i < n_active) {
      ItemSet bundle(order.begin() + static_cast<std::ptrdiff_t>(i) * t,
                     order.begin() + static_cast<std::ptrdiff_t>(i + 1) * t);
      bundle = make_item_set(std::move(bundle));
      out.meta.planted.bundles[i] = bundle;
      clauses.push_back(std::move(bundle));
    }
    for (std::uint32_t c = 0; c < extra_clauses; ++c) clauses.push_back(player_rng.sample_range(m, t));
    out.players.emplace_back(m, Rational(1), std::move(clauses));
  }
  out.meta.planted_welfare = welfare(out.meta.planted, out.players);
  out.meta.scalars["t"] = t;
  return out;
}

XosCase gen_random_xos(std::uint32_t n, std::uint32_t m, std::uint32_t clauses, std::uint32_t max_value,
                       std::uint64_t seed) {
  if (clauses < 1 || max_value < 1) throw ConfigError("random-xos needs clauses >= 1 and max_value >= 1");
  XosCase out;
  for (PlayerId i = 0; i < n; ++i) {
    auto rng = role_rng(seed, kRandomXos, i);
    std::vector<AdditiveClause> list;
    for (std::uint32_t c = 0; c < clauses; ++c) {
      std::map<ItemId, Rational> values;
      for (ItemId j = 0; j < m; ++j) {
        if (rng.below(2) == 1) values[j] = Rational(static_cast<std::int64_t>(1 + rng.below(max_value)));
      }
      list.emplace_back(values);
    }
    out.players.emplace_back(m, std::move(list));
  }
  out.meta.planted = Allocation(n);
  out.meta.planted_welfare = Rational(0);
  return out;
}

}  // namespace market_rounds
