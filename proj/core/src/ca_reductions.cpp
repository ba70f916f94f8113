#include "market_rounds/ca_reductions.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace market_rounds {

BinaryXOSValuation mu_projection(const XOSValuation& v, const Rational& mu) {
  if (mu <= 0) throw ConfigError("projection level mu must be positive");
  std::vector<ItemSet> sets;
  for (const auto& clause : v.clauses()) {
    ItemSet kept;
    for (const auto& [item, value] : clause.entries()) {
      if (value >= mu && value < 2 * mu) kept.push_back(item);
    }
    if (!kept.empty()) sets.push_back(std::move(kept));
  }
  return BinaryXOSValuation(v.m(), mu, std::move(sets));
}

std::vector<Rational> projection_levels(const XOSValuation& v) {
  ItemSet everything(v.m());
  std::iota(everything.begin(), everything.end(), ItemId{0});
  const auto total = evaluate_xos(v, everything).value;
  if (total <= 0) return {};
  const auto top = floor_power_of_two(total);
  const Rational floor_level = top / Rational(2 * static_cast<std::int64_t>(std::max<std::uint32_t>(v.m(), 1)));
  std::vector<Rational> levels{top};
  while (levels.back() > floor_level) levels.push_back(levels.back() / 2);
  return levels;
}

const char* to_string(InnerAlgorithm inner) {
  return inner == InnerAlgorithm::Simultaneous ? "simul" : "k-round";
}

namespace {

struct CellRun {
  Allocation allocation;
  std::vector<std::vector<BundleReport>> reports;  // per round
  bool greedy = false;
};

CellRun run_cell(std::span<const BinaryXOSValuation> projected, std::size_t bundle_size, const PipelineConfig& config) {
  CellRun cell;
  if (config.inner == InnerAlgorithm::Simultaneous) {
    auto run = simultaneous_with_bundle_size(projected, bundle_size, config.mode, config.cap);
    cell.allocation = std::move(run.allocation);
    cell.reports.push_back(std::move(run.reports));
    cell.greedy = run.greedy;
  } else {
    auto run = k_round_with_bundle_size(projected, bundle_size, config.k);
    cell.allocation = std::move(run.allocation);
    for (auto& round : run.rounds) cell.reports.push_back(std::move(round.reports));
  }
  return cell;
}

bool better_cell(const Rational& welfare, std::uint32_t t, const Rational& mu, const PipelineResult& best, bool have) {
  if (!have || welfare > best.welfare) return true;
  if (welfare < best.welfare) return false;
  if (t != best.chosen_t) return t < best.chosen_t;
  return mu < best.chosen_mu;
}

}  // namespace

PipelineResult run_xos_pipeline(std::span<const XOSValuation> players, const PipelineConfig& config) {
  if (players.empty()) throw ConfigError("pipeline needs at least one player");
  const auto m = players.front().m();
  for (const auto& v : players) {
    if (v.m() != m) throw ConfigError("all players must share one item universe");
  }
  if (config.inner == InnerAlgorithm::KRound && config.k < 1) throw ConfigError("k must be at least 1");
  const auto n = static_cast<PlayerId>(players.size());

  std::vector<std::vector<Rational>> levels(n);
  std::vector<Rational> grid;
  for (PlayerId i = 0; i < n; ++i) {
    levels[i] = projection_levels(players[i]);
    std::sort(levels[i].begin(), levels[i].end());
    grid.insert(grid.end(), levels[i].begin(), levels[i].end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<std::uint32_t> sizes;
  for (std::uint32_t t = 1; t <= std::max<std::uint32_t>(m, 1); t *= 2) sizes.push_back(t);

  PipelineResult result;
  result.allocation = Allocation(n);
  result.transcript = Transcript(std::max<std::uint32_t>(m, 1));
  bool have = false;

  // reports[(mu index, t index)][round][...]
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::vector<BundleReport>>> reports;
  std::size_t max_rounds = 0;

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto& mu = grid[g];
    std::vector<BinaryXOSValuation> projected;
    projected.reserve(n);
    for (PlayerId i = 0; i < n; ++i) {
      if (std::binary_search(levels[i].begin(), levels[i].end(), mu)) {
        projected.push_back(mu_projection(players[i], mu));
      } else {
        projected.emplace_back(m, mu, std::vector<ItemSet>{});
      }
    }
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      const auto t = sizes[s];
      const std::size_t divisor = config.inner == InnerAlgorithm::Simultaneous ? 2 : 2 * config.k;
      const auto bundle_size = std::max<std::size_t>(1, t / divisor);
      auto cell = run_cell(projected, bundle_size, config);

      const auto value = welfare(cell.allocation, players);
      result.cells.push_back(PipelineCell{mu, t, bundle_size, value, cell.greedy});
      result.any_greedy = result.any_greedy || cell.greedy;
      if (better_cell(value, t, mu, result, have)) {
        have = true;
        result.welfare = value;
        result.chosen_mu = mu;
        result.chosen_t = t;
        result.allocation = cell.allocation;
      }
      max_rounds = std::max(max_rounds, cell.reports.size());
      reports[{g, s}] = std::move(cell.reports);
    }
  }

  // Blackboard layout per round and player: for each of the player's levels, a Level header,
  // then for each t a Count followed by that many bundles.
  for (std::size_t r = 0; r < max_rounds; ++r) {
    result.transcript.begin_round();
    for (PlayerId i = 0; i < n; ++i) {
      for (const auto& mu : levels[i]) {
        const auto g = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), mu) - grid.begin());
        bool header = false;
        for (std::size_t s = 0; s < sizes.size(); ++s) {
          const auto& per_round = reports.at({g, s});
          if (r >= per_round.size()) continue;
          auto it = std::find_if(per_round[r].begin(), per_round[r].end(),
                                 [i](const BundleReport& rep) { return rep.player == i; });
          if (it == per_round[r].end()) continue;
          if (!header) {
            result.transcript.post(i, MessageKind::Level, {power_of_two_exponent(mu)});
            header = true;
          }
          result.transcript.post(i, MessageKind::Count, {static_cast<std::int64_t>(it->bundles.size())});
          for (const auto& b : it->bundles) result.transcript.post_bundle(i, b);
        }
      }
    }
  }
  return result;
}

TBin best_t_bin(const Allocation& optimum, std::span<const XOSValuation> valuations) {
  if (optimum.bundles.size() > valuations.size()) throw ConfigError("more bundles than valuations");
  std::map<std::uint32_t, Rational> bin_value;
  std::vector<std::uint32_t> bin_of(optimum.bundles.size(), 0);
  for (std::size_t i = 0; i < optimum.bundles.size(); ++i) {
    const auto size = optimum.bundles[i].size();
    if (size == 0) continue;
    std::uint32_t r = 1;
    while (2 * static_cast<std::size_t>(r) <= size) r *= 2;
    bin_of[i] = r;
    bin_value[r] += evaluate_xos(valuations[i], optimum.bundles[i]).value;
  }

  TBin out;
  out.t = 1;
  out.truncated = Allocation(optimum.bundles.size());
  bool have = false;
  for (const auto& [r, value] : bin_value) {
    if (!have || value > out.bin_value) {
      out.t = r;
      out.bin_value = value;
      have = true;
    }
  }
  if (!have) return out;

  for (std::size_t i = 0; i < optimum.bundles.size(); ++i) {
    if (bin_of[i] != out.t) continue;
    const auto& bundle = optimum.bundles[i];
    const auto& clause = valuations[i].clauses()[evaluate_xos(valuations[i], bundle).clause];
    ItemSet items = bundle;
    std::stable_sort(items.begin(), items.end(),
                     [&](ItemId a, ItemId b) { return clause.value_of(a) > clause.value_of(b); });
    items.resize(out.t);
    out.truncated.bundles[i] = make_item_set(std::move(items));
    out.truncated_value += evaluate_xos(valuations[i], out.truncated.bundles[i]).value;
  }
  return out;
}

}  // namespace market_rounds
