#include "market_rounds/ca_protocols.hpp"

#include <algorithm>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>

namespace market_rounds {

bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

BundleReport report_maximal_disjoint_bundles(const BinaryXOSValuation& v, std::size_t size,
                                             std::span<const ItemId> universe, PlayerId player) {
  if (size == 0) throw ConfigError("bundle size must be at least 1");
  for (ItemId j : universe) {
    if (j >= v.m()) throw DomainError("universe item " + std::to_string(j) + " outside [0, m)");
  }
  BundleReport report{player, size, {}};
  std::vector<bool> used(v.m(), false);
  for (const auto& clause : v.clause_sets()) {
    ItemSet candidates;
    for (ItemId j : clause) {
      if (!used[j] && contains(universe, j)) candidates.push_back(j);
    }
    for (std::size_t start = 0; start + size <= candidates.size(); start += size) {
      ItemSet bundle(candidates.begin() + static_cast<std::ptrdiff_t>(start),
                     candidates.begin() + static_cast<std::ptrdiff_t>(start + size));
      for (ItemId j : bundle) used[j] = true;
      report.bundles.push_back(std::move(bundle));
    }
  }
  return report;
}

BinaryXOSValuation make_proxy(const BundleReport& report, std::uint32_t m) {
  return BinaryXOSValuation(m, Rational(1), report.bundles);
}

const char* to_string(ProxyMode mode) {
  switch (mode) {
    case ProxyMode::Exact: return "exact";
    case ProxyMode::Greedy: return "greedy";
    case ProxyMode::Auto: return "auto";
  }
  return "?";
}

ProxyMode parse_proxy_mode(std::string_view text) {
  if (text == "exact") return ProxyMode::Exact;
  if (text == "greedy") return ProxyMode::Greedy;
  if (text == "auto") return ProxyMode::Auto;
  throw ConfigError("unknown proxy mode '" + std::string(text) + "' (expected exact, greedy or auto)");
}

namespace {

class ExactProxySearch {
 public:
  ExactProxySearch(std::span<const BinaryXOSValuation> proxies, std::uint32_t m)
      : proxies_(proxies), cover_(m, 0), choice_(proxies.size(), kNone), best_choice_(proxies.size(), kNone) {
    suffix_bound_.assign(proxies.size() + 1, 0);
    for (std::size_t i = proxies.size(); i-- > 0;) {
      std::size_t largest = 0;
      for (const auto& t : proxies[i].clause_sets()) largest = std::max(largest, t.size());
      suffix_bound_[i] = suffix_bound_[i + 1] + largest;
    }
  }

  std::vector<std::size_t> solve() {
    search(0);
    return best_choice_;
  }

  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

 private:
  void search(std::size_t i) {
    if (covered_ > best_ || (i == 0 && !found_)) {
      best_ = covered_;
      best_choice_ = choice_;
      found_ = true;
    }
    if (i == proxies_.size() || covered_ + suffix_bound_[i] <= best_) return;
    const auto& sets = proxies_[i].clause_sets();
    for (std::size_t b = 0; b < sets.size(); ++b) {
      for (ItemId j : sets[b]) covered_ += (cover_[j]++ == 0);
      choice_[i] = b;
      search(i + 1);
      for (ItemId j : sets[b]) covered_ -= (--cover_[j] == 0);
    }
    choice_[i] = kNone;
    search(i + 1);
  }

  std::span<const BinaryXOSValuation> proxies_;
  std::vector<std::uint32_t> cover_;
  std::vector<std::size_t> choice_;
  std::vector<std::size_t> best_choice_;
  std::vector<std::size_t> suffix_bound_;
  std::size_t covered_ = 0;
  std::size_t best_ = 0;
  bool found_ = false;
};

void complete_with_reported_items(std::span<const BinaryXOSValuation> proxies, std::vector<PlayerId>& owner) {
  constexpr auto kFree = static_cast<PlayerId>(-1);
  for (PlayerId i = 0; i < proxies.size(); ++i) {
    for (const auto& t : proxies[i].clause_sets()) {
      for (ItemId j : t) {
        if (owner[j] == kFree) owner[j] = i;
      }
    }
  }
}

Allocation allocation_from_owners(const std::vector<PlayerId>& owner, std::size_t n) {
  Allocation alloc(n);
  for (ItemId j = 0; j < owner.size(); ++j) {
    if (owner[j] != static_cast<PlayerId>(-1)) alloc.bundles[owner[j]].push_back(j);
  }
  return alloc;
}

}  // namespace

ProxyAllocation best_allocation_wrt_proxy(std::span<const BinaryXOSValuation> proxies, std::uint32_t m,
                                          ProxyMode mode, std::size_t cap) {
  std::size_t total_bundles = 0;
  for (const auto& p : proxies) total_bundles += p.clause_sets().size();

  if (mode == ProxyMode::Auto) mode = total_bundles <= cap ? ProxyMode::Exact : ProxyMode::Greedy;
  if (mode == ProxyMode::Exact && total_bundles > cap) {
    throw CapExceeded(std::to_string(total_bundles) + " reported bundles exceed the exact-search cap of " +
                      std::to_string(cap) + "; use greedy mode");
  }

  constexpr auto kFree = static_cast<PlayerId>(-1);
  std::vector<PlayerId> owner(m, kFree);
  ProxyAllocation out;
  out.greedy = mode == ProxyMode::Greedy;

  if (mode == ProxyMode::Exact) {
    const auto choice = ExactProxySearch(proxies, m).solve();
    for (PlayerId i = 0; i < proxies.size(); ++i) {
      if (choice[i] == ExactProxySearch::kNone) continue;
      for (ItemId j : proxies[i].clause_sets()[choice[i]]) {
        if (owner[j] == kFree) owner[j] = i;
      }
    }
  } else {
    std::vector<std::pair<std::size_t, PlayerId>> order;
    for (PlayerId i = 0; i < proxies.size(); ++i) {
      std::size_t largest = 0;
      for (const auto& t : proxies[i].clause_sets()) largest = std::max(largest, t.size());
      if (largest > 0) order.emplace_back(largest, i);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [largest, i] : order) {
      const ItemSet* best = nullptr;
      std::size_t best_free = 0;
      for (const auto& t : proxies[i].clause_sets()) {
        std::size_t free = 0;
        for (ItemId j : t) free += owner[j] == kFree;
        if (free > best_free) {
          best_free = free;
          best = &t;
        }
      }
      if (best == nullptr) continue;
      for (ItemId j : *best) {
        if (owner[j] == kFree) owner[j] = i;
      }
    }
  }

  complete_with_reported_items(proxies, owner);
  out.allocation = allocation_from_owners(owner, proxies.size());
  for (PlayerId i = 0; i < proxies.size(); ++i) out.proxy_units += proxies[i].units(out.allocation.bundles[i]);
  return out;
}

namespace {

std::uint32_t common_universe(std::span<const BinaryXOSValuation> players) {
  if (players.empty()) return 0;
  const auto m = players.front().m();
  for (const auto& v : players) {
    if (v.m() != m) throw ConfigError("all players must share one item universe");
  }
  return m;
}

}  // namespace

CaRun simultaneous_with_bundle_size(std::span<const BinaryXOSValuation> players, std::size_t bundle_size,
                                    ProxyMode mode, std::size_t cap) {
  const auto m = common_universe(players);
  ItemSet everything(m);
  std::iota(everything.begin(), everything.end(), ItemId{0});

  CaRun run;
  run.transcript = Transcript(std::max<std::uint32_t>(m, 1));
  run.transcript.begin_round();
  std::vector<BinaryXOSValuation> proxies;
  proxies.reserve(players.size());
  for (PlayerId i = 0; i < players.size(); ++i) {
    run.reports.push_back(report_maximal_disjoint_bundles(players[i], bundle_size, everything, i));
    for (const auto& b : run.reports.back().bundles) run.transcript.post_bundle(i, b);
    proxies.push_back(make_proxy(run.reports.back(), m));
  }
  auto best = best_allocation_wrt_proxy(proxies, m, mode, cap);
  run.allocation = std::move(best.allocation);
  run.greedy = best.greedy;
  return run;
}

CaRun simultaneous_t_restricted(std::span<const BinaryXOSValuation> players, std::uint32_t t, ProxyMode mode,
                                std::size_t cap) {
  if (!is_power_of_two(t)) throw ConfigError("t must be a power of two, got " + std::to_string(t));
  if (t < 2) throw ConfigError("t/2 must be at least 1");
  return simultaneous_with_bundle_size(players, t / 2, mode, cap);
}

bool meets_grant_threshold(std::size_t remaining, std::size_t size, std::uint32_t m, std::uint32_t k) {
  using boost::multiprecision::cpp_int;
  if (size == 0) return false;
  cpp_int lhs = boost::multiprecision::pow(cpp_int(remaining), k + 1) * m;
  cpp_int rhs = boost::multiprecision::pow(cpp_int(size), k + 1);
  return lhs >= rhs;
}

KRoundCaResult k_round_with_bundle_size(std::span<const BinaryXOSValuation> players, std::size_t bundle_size,
                                        std::uint32_t k) {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (bundle_size < 1) throw ConfigError("bundle size must be at least 1");
  const auto m = common_universe(players);
  const auto n = static_cast<std::uint32_t>(players.size());

  KRoundCaResult result;
  result.allocation = Allocation(n);
  result.transcript = Transcript(std::max<std::uint32_t>(m, 1));

  std::vector<bool> allocated(m, false);
  std::vector<bool> done(n, false);
  ItemSet everything(m);
  std::iota(everything.begin(), everything.end(), ItemId{0});
  std::vector<ItemSet> universe(n, everything);

  for (std::uint32_t round = 1; round <= k; ++round) {
    KRoundCaRound trace;
    for (PlayerId i = 0; i < n; ++i) {
      if (!done[i]) trace.active.push_back(i);
    }
    if (trace.active.empty()) break;
    for (ItemId j = 0; j < m; ++j) {
      if (!allocated[j]) trace.available.push_back(j);
    }
    trace.player_universe.assign(n, {});

    result.transcript.begin_round();
    for (PlayerId i : trace.active) {
      trace.player_universe[i] = universe[i];
      trace.reports.push_back(report_maximal_disjoint_bundles(players[i], bundle_size, universe[i], i));
      for (const auto& b : trace.reports.back().bundles) result.transcript.post_bundle(i, b);
    }

    for (const auto& report : trace.reports) {
      const ItemSet* chosen = nullptr;
      std::size_t chosen_free = 0;
      for (const auto& bundle : report.bundles) {
        std::size_t free = 0;
        for (ItemId j : bundle) free += !allocated[j];
        if (free > chosen_free && meets_grant_threshold(free, bundle.size(), m, k)) {
          chosen = &bundle;
          chosen_free = free;
        }
      }
      if (chosen == nullptr) continue;
      ItemSet grant;
      for (ItemId j : *chosen) {
        if (allocated[j]) continue;
        allocated[j] = true;
        grant.push_back(j);
      }
      result.allocation.bundles[report.player] = grant;
      done[report.player] = true;
      trace.grants.emplace_back(report.player, std::move(grant));
    }

    for (const auto& report : trace.reports) {
      ItemSet next;
      for (const auto& bundle : report.bundles) {
        for (ItemId j : bundle) {
          if (!allocated[j]) next.push_back(j);
        }
      }
      universe[report.player] = make_item_set(std::move(next));
    }
    result.rounds.push_back(std::move(trace));
  }
  return result;
}

KRoundCaResult k_round_t_restricted(std::span<const BinaryXOSValuation> players, std::uint32_t t, std::uint32_t k) {
  if (!is_power_of_two(t)) throw ConfigError("t must be a power of two, got " + std::to_string(t));
  if (k < 1) throw ConfigError("k must be at least 1");
  const auto m = common_universe(players);
  if ((std::uint64_t{1} << k) > m) {
    throw ConfigError("k=" + std::to_string(k) + " exceeds log2 m for m=" + std::to_string(m));
  }
  if (t < 2 * k) throw ConfigError("t/(2k) must be at least 1");
  return k_round_with_bundle_size(players, t / (2 * k), k);
}

}  // namespace market_rounds
