#include <gtest/gtest.h>

#include <cmath>

#include "market_rounds/ca_reductions.hpp"
#include "market_rounds/instance_gen.hpp"
#include "market_rounds/welfare_oracle.hpp"
#include "support/oracles.hpp"

using namespace market_rounds;

namespace {

XOSValuation uniform_clause(std::uint32_t m, const ItemSet& items, Rational value = Rational(1)) {
  std::map<ItemId, Rational> values;
  for (ItemId j : items) values[j] = value;
  return XOSValuation(m, {AdditiveClause(values)});
}

}  // namespace

TEST(MuProjection, KeepsHalfOpenBand) {
  const XOSValuation v(3, {AdditiveClause({{0, Rational(3, 2)}, {1, Rational(3)}, {2, Rational(2, 5)}})});
  const auto p = mu_projection(v, Rational(1));
  EXPECT_EQ(p.clause_sets(), (std::vector<ItemSet>{{0}}));
  EXPECT_EQ(p.mu(), Rational(1));
}

TEST(MuProjection, LowerBoundaryIncluded) {
  const Rational mu(3, 8);
  EXPECT_EQ(mu_projection(XOSValuation(1, {AdditiveClause({{0, mu}})}), mu).clause_sets(),
            (std::vector<ItemSet>{{0}}));
}

TEST(MuProjection, UpperBoundaryExcluded) {
  const Rational mu(3, 8);
  EXPECT_TRUE(mu_projection(XOSValuation(1, {AdditiveClause({{0, 2 * mu}})}), mu).clause_sets().empty());
  EXPECT_THROW(mu_projection(XOSValuation(1, {}), Rational(0)), ConfigError);
}

TEST(MuProjection, LosesAtMostHalfOfBandValue) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t m = 8;
    std::map<ItemId, Rational> values;
    for (ItemId j = 0; j < m; ++j) values[j] = Rational(static_cast<std::int64_t>(1 + rng.below(16)), 4);
    const XOSValuation v(m, {AdditiveClause(values)});
    const Rational mu = floor_power_of_two(Rational(static_cast<std::int64_t>(1 + rng.below(4))));
    const auto p = mu_projection(v, mu);
    ItemSet s;
    for (ItemId j = 0; j < m; ++j) {
      if (rng.below(2) == 1) s.push_back(j);
    }
    Rational band(0);
    for (ItemId j : s) {
      if (values[j] >= mu && values[j] < 2 * mu) band += values[j];
    }
    EXPECT_GE(mu * Rational(static_cast<std::int64_t>(p.units(s))), band / 2);
  }
}

TEST(ProjectionLevels, PowerOfTwoGrid) {
  // v(M) = 10 -> MAX = 8; m = 4 -> floor level 1.
  const auto v = uniform_clause(4, {0, 1, 2, 3}, Rational(5, 2));
  const auto levels = projection_levels(v);
  EXPECT_EQ(levels, (std::vector<Rational>{Rational(8), Rational(4), Rational(2), Rational(1)}));
  EXPECT_TRUE(projection_levels(XOSValuation(4, {})).empty());
}

TEST(ProjectionLevels, SizeBound) {
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = 2 + static_cast<std::uint32_t>(rng.below(30));
    const auto v = uniform_clause(m, rng.sample_range(m, 1 + rng.below(m)), Rational(1 + rng.below(9), 1 + rng.below(5)));
    const auto levels = projection_levels(v);
    EXPECT_LE(static_cast<double>(levels.size()), 2 * std::log2(static_cast<double>(m)) + 2);
    for (std::size_t i = 1; i < levels.size(); ++i) EXPECT_EQ(levels[i - 1], 2 * levels[i]);
  }
}

TEST(Pipeline, SinglePlayerRecoversClause) {
  std::vector<XOSValuation> players{uniform_clause(4, {0, 1, 2, 3})};
  const auto run = run_xos_pipeline(players, PipelineConfig{});
  EXPECT_EQ(run.welfare, Rational(4));
}

TEST(Pipeline, DisjointClausesOfSizesTwoAndEight) {
  std::vector<XOSValuation> players{uniform_clause(16, {0, 1}), uniform_clause(16, {2, 3, 4, 5, 6, 7, 8, 9})};
  const auto run = run_xos_pipeline(players, PipelineConfig{});
  EXPECT_EQ(run.welfare, Rational(10));
  EXPECT_EQ(run.transcript.total_rounds(), 1U);
}

TEST(Pipeline, BestOfCellsAndFeasible) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto c = gen_random_xos(3, 8, 2, 8, seed);
    for (auto inner : {InnerAlgorithm::Simultaneous, InnerAlgorithm::KRound}) {
      PipelineConfig config;
      config.inner = inner;
      const auto run = run_xos_pipeline(c.players, config);
      ASSERT_TRUE(check_feasible(run.allocation, 8));
      EXPECT_EQ(welfare(run.allocation, c.players), run.welfare);
      for (const auto& cell : run.cells) EXPECT_LE(cell.welfare, run.welfare);
      EXPECT_TRUE(run.transcript.verify());
      if (inner == InnerAlgorithm::Simultaneous) {
        EXPECT_EQ(run.transcript.total_rounds(), 1U);
      }
    }
  }
}

TEST(Pipeline, RatioAgainstOptimum) {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::uint32_t m = 4 + static_cast<std::uint32_t>(seed % 7);
    const auto c = gen_random_xos(2, m, 2, 8, seed);
    const auto opt = optimal_welfare(c.players).value;
    const auto alg = run_xos_pipeline(c.players, PipelineConfig{}).welfare;
    ASSERT_GT(alg, Rational(0));
    const double scale = std::cbrt(m) * std::pow(std::log2(m), 3);
    worst = std::max(worst, to_double(opt / alg) / scale);
  }
  RecordProperty("worst_c", std::to_string(worst));
  EXPECT_LE(worst, 8.0);
}

TEST(TBin, EqualSizesIdentityTruncation) {
  std::vector<XOSValuation> players(2, uniform_clause(8, {0, 1, 2, 3, 4, 5, 6, 7}));
  const Allocation opt({{0, 1, 2, 3}, {4, 5, 6, 7}});
  const auto bin = best_t_bin(opt, players);
  EXPECT_EQ(bin.t, 4U);
  EXPECT_EQ(bin.truncated, opt);
  EXPECT_EQ(bin.truncated_value, Rational(8));
}

TEST(TBin, SizesOneOneSeven) {
  std::vector<XOSValuation> players(3, uniform_clause(9, {0, 1, 2, 3, 4, 5, 6, 7, 8}));
  const Allocation opt({{0}, {1}, {2, 3, 4, 5, 6, 7, 8}});
  const auto bin = best_t_bin(opt, players);
  EXPECT_EQ(bin.t, 4U);
  EXPECT_EQ(bin.bin_value, Rational(7));
  EXPECT_EQ(bin.truncated.bundles[2].size(), 4U);
  EXPECT_TRUE(bin.truncated.bundles[0].empty());
  EXPECT_EQ(bin.truncated_value, Rational(4));
}

TEST(TBin, LemmaInequalityOnRandomOptima) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::uint32_t m = 6 + static_cast<std::uint32_t>(seed % 5);
    const auto c = gen_random_xos(3, m, 3, 8, seed);
    const auto opt = optimal_welfare(c.players);
    if (opt.value == Rational(0)) continue;
    const auto bin = best_t_bin(opt.allocation, c.players);
    EXPECT_TRUE(check_feasible(bin.truncated, m));
    for (std::size_t i = 0; i < bin.truncated.bundles.size(); ++i) {
      const auto size = bin.truncated.bundles[i].size();
      EXPECT_TRUE(size == 0 || size == bin.t);
      EXPECT_TRUE(is_subset(bin.truncated.bundles[i], opt.allocation.bundles[i]));
    }
    EXPECT_GE(to_double(bin.truncated_value), to_double(opt.value) / (4 * std::log2(static_cast<double>(m))));
  }
}

TEST(WelfareOracle, MatchesEnumeration) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::uint32_t m = 2 + static_cast<std::uint32_t>(seed % 6);
    const auto c = gen_random_xos(1 + seed % 3, m, 2, 5, seed);
    const auto opt = optimal_welfare(c.players);
    EXPECT_EQ(opt.value, oracle::enumerate_welfare(c.players, m));
    EXPECT_EQ(welfare(opt.allocation, c.players), opt.value);
  }
}

TEST(WelfareOracle, FractionalValuesAndLimits) {
  std::vector<XOSValuation> players{XOSValuation(2, {AdditiveClause({{0, Rational(1, 3)}, {1, Rational(1, 2)}})}),
                                    XOSValuation(2, {AdditiveClause({{0, Rational(2, 5)}})})};
  EXPECT_EQ(optimal_welfare(players).value, Rational(2, 5) + Rational(1, 2));
  std::vector<XOSValuation> big{XOSValuation(kMaxOracleItems + 1, {})};
  EXPECT_THROW(optimal_welfare(big), ConfigError);
}
