// Acceptance run: one PASS/FAIL line per criterion, then a summary.
// Exit status is 0 when the set of failing criteria equals --known-failures.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "market_rounds/ca_protocols.hpp"
#include "market_rounds/ca_reductions.hpp"
#include "market_rounds/harness.hpp"
#include "market_rounds/instance_gen.hpp"
#include "market_rounds/matching_oracle.hpp"
#include "market_rounds/matching_protocols.hpp"
#include "market_rounds/welfare_oracle.hpp"
#include "support/oracles.hpp"

using namespace market_rounds;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ItemSet all_items(std::uint32_t m) {
  ItemSet s(m);
  for (ItemId j = 0; j < m; ++j) s[j] = j;
  return s;
}

ItemSet reported_union(const BundleReport& report) {
  ItemSet out;
  for (const auto& b : report.bundles) out = set_union(out, b);
  return out;
}

std::string fmt(double x, int precision = 3) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << x;
  return out.str();
}

// 1: oracle equivalence ----------------------------------------------------------------

void oracle_equivalence(Outcome& out) {
  const auto start = Clock::now();
  Rng rng(101);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = 1 + static_cast<std::uint32_t>(rng.below(8));
    const auto inst = oracle::random_matching_instance(rng, n, 0.15 + 0.5 * rng.uniform01());
    const auto m = max_matching(inst);
    const bool ok = is_valid_matching(inst, m) && m.size() == oracle::brute_force_matching_size(inst) &&
                    emit_certificate(inst, m).has_value();
    if (!ok) ++mismatches;
  }
  out.check(mismatches == 0, std::to_string(mismatches) + " brute-force mismatches");

  std::size_t protocol_mismatches = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = 1 + static_cast<std::uint32_t>(rng.below(64));
    const auto inst = oracle::random_matching_instance(rng, n, (1.0 + 3.0 * rng.uniform01()) / n);
    const auto run = exact_matching_protocol(inst, rng.next());
    if (!is_valid_matching(inst, run.matching) || run.matching.size() != max_matching(inst).size() ||
        !run.transcript.verify()) {
      ++protocol_mismatches;
    }
  }
  out.check(protocol_mismatches == 0, std::to_string(protocol_mismatches) + " exact-protocol mismatches");
  const double elapsed = seconds_since(start);
  out.check(elapsed < 60.0, "runtime over one minute");
  out.detail << "brute-force mismatches " << mismatches << "/500, protocol mismatches " << protocol_mismatches
             << "/500, " << fmt(elapsed, 2) << " s";
}

// 2: auction guarantee ------------------------------------------------------------------

void auction_guarantee(Outcome& out) {
  const auto start = Clock::now();
  for (std::uint32_t n : {16U, 64U}) {
    for (const Rational delta : {Rational(1, 2), Rational(1, 4)}) {
      ExperimentConfig config;
      config.distribution = parse_distribution("uniform", "n=" + std::to_string(n) + ",d=3");
      AlgoSpec algo;
      algo.name = "auction";
      algo.delta = delta;
      const double d = to_double(delta);
      const auto budget = static_cast<std::uint64_t>(std::ceil(16.0 * std::log2(n) / (d * d)));
      algo.max_rounds = budget;
      config.algorithms = {algo};
      config.seed_count = 200;
      config.opt = OptPolicy::Exact;
      const auto report = run_batch(config);
      const double bound = (1 - 2 * d) * report.opt.mean - 3 * report.alg_welfare.stderr_;
      const std::string tag = "n=" + std::to_string(n) + " delta=" + to_string(delta);
      out.check(report.failed == 0, tag + " had failed seeds");
      out.check(report.alg_welfare.mean >= bound, tag + " mean below bound");
      out.check(report.rounds.max <= static_cast<double>(budget), tag + " exceeded round budget");
      out.detail << tag << ": " << fmt(report.alg_welfare.mean, 2) << " vs bound " << fmt(bound, 2) << " (OPT "
                 << fmt(report.opt.mean, 2) << ", rounds<=" << report.rounds.max << "/" << budget << "); ";
    }
  }
  const double elapsed = seconds_since(start);
  out.check(elapsed < 120.0, "runtime over two minutes");
  out.detail << fmt(elapsed, 2) << " s";
}

// 3: invariant suite --------------------------------------------------------------------

void auction_invariants(Outcome& out, Rng& rng) {
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 2 + static_cast<std::uint32_t>(rng.below(30));
    const auto inst = gen_uniform_matching(n, std::min<std::uint32_t>(3, n), rng.next()).instance;
    AuctionConfig config;
    config.delta = trial % 2 == 0 ? Rational(1, 4) : Rational(1, 3);
    config.record_history = true;
    const auto run = auction_matching(inst, config, rng.next());
    const auto q = unit_fraction_denominator(config.delta);
    out.check(is_valid_matching(inst, run.matching), "auction matching invalid");
    out.check(check_feasible(run.matching.to_allocation(), n), "auction allocation infeasible");
    std::vector<std::uint32_t> prev(n, 0);
    for (const auto& snap : run.history) {
      std::set<ItemId> held;
      for (PlayerId i = 0; i < n; ++i) {
        if (!snap.committed[i]) continue;
        const ItemId j = *snap.committed[i];
        out.check(held.insert(j).second, "item committed twice");
        out.check(oracle::has(inst.neighbors(i), j), "committed to a non-neighbor");
        out.check(snap.ticks[j] >= 1, "committed item at price zero");
      }
      for (ItemId j = 0; j < n; ++j) {
        out.check(snap.ticks[j] >= prev[j], "price decreased");
        out.check(snap.ticks[j] <= q, "price above one");
      }
      prev = snap.ticks;
    }
  }
}

void matching_k_round_invariants(Outcome& out, Rng& rng) {
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 4 + static_cast<std::uint32_t>(rng.below(60));
    const auto inst = oracle::random_matching_instance(rng, n, 3.0 / n);
    const auto k = 1 + static_cast<std::uint32_t>(rng.below(std::max(1U, static_cast<std::uint32_t>(std::log2(n)))));
    const auto run = k_round_matching(inst, k, rng.next());
    out.check(is_valid_matching(inst, run.matching), "k-round matching invalid");
    for (std::size_t r = 1; r < run.active.size(); ++r) {
      out.check(is_subset(run.available[r], run.available[r - 1]), "U grew");
      out.check(is_subset(run.active[r], run.active[r - 1]), "N grew");
    }
  }
}

void report_invariants(Outcome& out, Rng& rng) {
  for (int trial = 0; trial < 300; ++trial) {
    const auto m = 2 + static_cast<std::uint32_t>(rng.below(9));
    const auto v = oracle::random_binary_players(rng, 1, m, 4, 0.5)[0];
    const std::size_t size = 1 + rng.below(3);
    const auto universe = rng.sample_range(m, 1 + rng.below(m));
    const auto report = report_maximal_disjoint_bundles(v, size, universe);
    std::vector<bool> seen(m, false);
    for (const auto& b : report.bundles) {
      out.check(b.size() == size && v.units(b) == size, "reported bundle not fully valued");
      out.check(is_subset(b, universe), "bundle outside the universe");
      for (ItemId j : b) {
        out.check(!seen[j], "reported bundles overlap");
        seen[j] = true;
      }
    }
    out.check(oracle::report_is_maximal(v, size, universe, report.bundles), "report not maximal");
  }
}

void phi_claim(Outcome& out) {
  std::size_t worst = 4;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto c = gen_planted_t_restricted(3, 4, 16, 3, seed);
    const auto run = simultaneous_t_restricted(c.players, 4, ProxyMode::Auto);
    out.check(check_feasible(run.allocation, 16), "simultaneous allocation infeasible");
    for (PlayerId i = 0; i < 3; ++i) {
      const auto phi = intersection_size(c.meta.planted.bundles[i], reported_union(run.reports[i]));
      worst = std::min(worst, phi);
      out.check(2 * phi >= 4, "|Phi_i| < t/2");
    }
  }
  out.detail << "min |Phi_i| " << worst << " (t=4); ";
}

void induction_claim(Outcome& out) {
  std::int64_t worst_slack = std::numeric_limits<std::int64_t>::max();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (std::uint32_t k : {1U, 2U}) {
      const std::uint32_t t = 8, m = 40;
      const auto c = gen_planted_t_restricted(4, t, m, 3, seed, 6);
      const auto run = k_round_t_restricted(c.players, t, k);
      out.check(check_feasible(run.allocation, m), "k-round CA allocation infeasible");
      const std::size_t size = t / (2 * k);
      std::vector<bool> granted(c.players.size(), false);
      for (std::size_t r = 0; r < run.rounds.size(); ++r) {
        const auto& round = run.rounds[r];
        for (PlayerId i : round.active) out.check(!granted[i], "granted player active again");
        for (const auto& [i, g] : round.grants) {
          granted[i] = true;
          out.check(meets_grant_threshold(g.size(), size, m, k), "grant below threshold");
        }
        if (r > 0) {
          out.check(is_subset(round.available, run.rounds[r - 1].available), "U_r grew");
          for (PlayerId i : round.active) {
            out.check(is_subset(round.player_universe[i], run.rounds[r - 1].player_universe[i]), "U_{r,i} grew");
          }
        }
        for (const auto& report : round.reports) {
          const auto& planted = c.meta.planted.bundles[report.player];
          if (planted.empty()) continue;
          const auto lhs = static_cast<std::int64_t>(intersection_size(planted, round.available)) -
                           static_cast<std::int64_t>(intersection_size(planted, reported_union(report)));
          const auto rhs = static_cast<std::int64_t>((r + 1) * size);
          worst_slack = std::min(worst_slack, rhs - lhs);
          out.check(lhs <= rhs, "per-round inequality violated");
        }
      }
    }
  }
  out.detail << "min per-round slack " << worst_slack;
}

void invariant_suite(Outcome& out) {
  Rng rng(303);
  auction_invariants(out, rng);
  matching_k_round_invariants(out, rng);
  report_invariants(out, rng);
  phi_claim(out);
  induction_claim(out);
}

// 4: proxy optimizer --------------------------------------------------------------------

void proxy_optimizer(Outcome& out) {
  Rng rng(404);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = 1 + static_cast<std::uint32_t>(rng.below(8));
    const auto n = 1 + rng.below(3);
    const auto players = oracle::random_binary_players(rng, n, m, 3, 0.5);
    const std::size_t size = 1 + rng.below(2);
    std::vector<BinaryXOSValuation> proxies;
    for (std::size_t i = 0; i < n; ++i) {
      proxies.push_back(make_proxy(report_maximal_disjoint_bundles(players[i], size, all_items(m)), m));
    }
    const auto best = best_allocation_wrt_proxy(proxies, m, ProxyMode::Exact, 1000);
    if (!check_feasible(best.allocation, m) || best.proxy_units != oracle::enumerate_proxy_units(proxies, m)) {
      ++mismatches;
    }
  }
  out.check(mismatches == 0, std::to_string(mismatches) + " mismatches");
  out.detail << "mismatches " << mismatches << "/200";
}

// 5: pipeline end to end ----------------------------------------------------------------

void pipeline_end_to_end(Outcome& out) {
  double worst = 0;
  std::uint32_t worst_m = 0;
  std::size_t cross_checked = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto m = 2 + static_cast<std::uint32_t>(seed % 11);
    const auto n = 2 + static_cast<std::uint32_t>(seed % 3);
    const auto c = gen_random_xos(n, m, 1 + static_cast<std::uint32_t>(seed % 3), 8, seed);
    const auto opt = optimal_welfare(c.players).value;
    if (std::pow(n + 1.0, m) <= 2e6) {
      ++cross_checked;
      out.check(opt == oracle::enumerate_welfare(c.players, m), "welfare oracle disagrees with enumeration");
    }
    const auto run = run_xos_pipeline(c.players, PipelineConfig{});
    out.check(check_feasible(run.allocation, m), "pipeline allocation infeasible");
    if (opt == Rational(0)) continue;
    if (run.welfare == Rational(0)) {
      worst = std::numeric_limits<double>::infinity();
      continue;
    }
    const double lm = std::log2(static_cast<double>(m));
    const double c_needed = to_double(opt / run.welfare) / (std::cbrt(static_cast<double>(m)) * lm * lm * lm);
    if (c_needed > worst) {
      worst = c_needed;
      worst_m = m;
    }
  }
  out.check(worst <= 8.0, "worst c above 8");
  out.detail << "worst c " << fmt(worst, 4) << " (m=" << worst_m << "), OPT cross-checked by enumeration on "
             << cross_checked << " instances";
}

// 6: planted welfare of the hard XOS distribution -----------------------------------------

void planted_welfare(Outcome& out) {
  const double k = 3;
  const double closed = std::pow(k, 4) * (1 - std::pow(1 - 1 / (k * k * k), k * k * k));
  std::vector<double> values;
  for (std::uint64_t seed = 0; seed < 100; ++seed) values.push_back(to_double(gen_xos_hard(3, 8, seed).meta.planted_welfare));
  const auto s = summarize(values);
  out.check(std::abs(s.mean - closed) <= 0.1 * closed, "mean outside 10% band");
  out.detail << "mean " << fmt(s.mean, 2) << " vs closed form " << fmt(closed, 2);
}

// 7: interaction gap ----------------------------------------------------------------------

void interaction_gap(Outcome& out) {
  ExperimentConfig config;
  config.distribution = parse_distribution("xos-hard", "k=3,t_sets=8");
  config.algorithms = {parse_algo_spec("pipeline-simul"), parse_algo_spec("pipeline-k-round:k=3")};
  config.seed_count = 100;
  config.opt = OptPolicy::Planted;
  const auto report = compare_algos(config);
  const auto& simul = report.reports[0].alg_welfare;
  const auto& kround = report.reports[1].alg_welfare;
  const auto& delta = report.deltas[0].welfare_delta;  // k-round minus simultaneous, per seed
  out.check(report.reports[0].failed == 0 && report.reports[1].failed == 0, "failed seeds");
  out.check(delta.mean > 0 && delta.mean >= 3 * delta.stderr_, "simultaneous not below k-round by 3 stderr");
  out.detail << "simultaneous " << fmt(simul.mean, 2) << " (se " << fmt(simul.stderr_, 2) << "), k-round(k=3) "
             << fmt(kround.mean, 2) << " (se " << fmt(kround.stderr_, 2) << "), paired gap " << fmt(delta.mean, 2)
             << " (se " << fmt(delta.stderr_, 2) << "), planted " << fmt(report.reports[0].opt.mean, 2);
}

// 8: determinism --------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(Outcome& out, const std::filesystem::path& scratch) {
  std::filesystem::create_directories(scratch);
  const std::vector<std::pair<std::string, std::string>> runs{
      {"match-hard:n=36", "auction:delta=1/4"},     {"uniform:n=64,d=3", "k-round:k=3"},
      {"uniform:n=32,d=3", "exact"},                {"planted-t:n_active=4,t=8,m=40,extra=3", "ca-k-round:t=8,k=2"},
      {"planted-t:n_active=3,t=4,m=16,extra=3", "ca-simul:t=4"}, {"random-xos:n=3,m=10", "pipeline-simul"},
      {"xos-hard:k=2,t_sets=4", "pipeline-k-round:k=2"}};
  std::size_t identical = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& [dist, algo] = runs[r];
    const auto colon = dist.find(':');
    ExperimentConfig config;
    config.distribution = parse_distribution(dist.substr(0, colon), dist.substr(colon + 1));
    config.algorithms = {parse_algo_spec(algo)};
    config.seed_count = 20;
    config.keep_transcripts = true;
    std::vector<std::pair<std::string, std::string>> outputs;
    for (unsigned threads : {1U, 1U, 4U}) {
      config.threads = threads;
      const auto stem = scratch / ("run" + std::to_string(r) + "_" + std::to_string(outputs.size()));
      config.csv_path = stem.string() + ".csv";
      config.json_path = stem.string() + ".json";
      run_batch(config);
      outputs.emplace_back(slurp(*config.csv_path), slurp(*config.json_path));
    }
    const bool same = outputs[0] == outputs[1] && outputs[0] == outputs[2] && !outputs[0].first.empty();
    out.check(same, dist + " / " + algo + " differs between reruns");
    if (same) ++identical;
  }
  out.detail << identical << "/" << runs.size() << " configs byte-identical across 3 reruns (threads 1, 1, 4)";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"market-rounds acceptance run"};
  std::vector<int> known;
  std::string scratch = (std::filesystem::temp_directory_path() / "market_rounds_acceptance").string();
  app.add_option("--known-failures", known, "criteria expected to fail")->delimiter(',');
  app.add_option("--scratch", scratch, "directory for batch outputs");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"auction guarantee", auction_guarantee},
      {"invariant suite", invariant_suite},
      {"proxy optimizer vs enumeration", proxy_optimizer},
      {"pipeline end to end", pipeline_end_to_end},
      {"planted welfare of hard XOS", planted_welfare},
      {"interaction gap", interaction_gap},
      {"batch determinism", [&](Outcome& o) { determinism(o, scratch); }},
  };

  std::set<int> failing;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    const auto start = Clock::now();
    try {
      criteria[i].second(outcome);
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail << "exception: " << e.what();
    }
    const int id = static_cast<int>(i + 1);
    if (!outcome.pass) failing.insert(id);
    std::cout << "criterion " << id << " " << (outcome.pass ? "PASS" : "FAIL") << " [" << criteria[i].first << "] "
              << outcome.detail.str() << " (" << fmt(seconds_since(start), 2) << " s)" << std::endl;
  }

  const std::set<int> expected(known.begin(), known.end());
  std::cout << (criteria.size() - failing.size()) << "/" << criteria.size() << " criteria pass";
  if (!expected.empty()) {
    std::cout << "; known failures:";
    for (int k : expected) std::cout << ' ' << k;
  }
  std::cout << std::endl;
  return failing == expected ? 0 : 1;
}
