#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "market_rounds/instance_gen.hpp"
#include "market_rounds/matching_oracle.hpp"
#include "support/oracles.hpp"

using namespace market_rounds;

namespace {

constexpr double kChi7 = 24.32;  // 0.999 quantile, 7 degrees of freedom
constexpr double kChi3 = 16.27;  // 0.999 quantile, 3 degrees of freedom

}  // namespace

TEST(WRandom, SharedSetAndPlanted) {
  const auto c = gen_w_random(10, 4, 5);
  const auto& u = c.meta.sets.at("U");
  EXPECT_EQ(u.size(), 4U);
  for (PlayerId i = 0; i < 10; ++i) EXPECT_EQ(c.instance.neighbors(i), u);
  EXPECT_EQ(c.meta.planted_welfare, Rational(4));
  EXPECT_EQ(max_matching(c.instance).size(), 4U);
  EXPECT_THROW(gen_w_random(4, 0, 1), ConfigError);
  EXPECT_THROW(gen_w_random(4, 5, 1), ConfigError);
}

TEST(MatchHard, Shape) {
  const auto c = gen_matching_hard(16, 3);
  const auto& t = c.meta.sets.at("T");
  EXPECT_EQ(t.size(), 8U);
  for (PlayerId i = 0; i < 16; ++i) {
    const auto& s = c.instance.neighbors(i);
    ASSERT_EQ(s.size(), 5U);
    const auto outside = set_difference(s, t);
    ASSERT_EQ(outside.size(), 1U);
    EXPECT_EQ(outside, c.meta.set_lists.at("outside_item")[i]);
  }
}

TEST(MatchHard, RejectsSmallAndNonSquare) {
  EXPECT_THROW(gen_matching_hard(4, 0), ConfigError);
  EXPECT_THROW(gen_matching_hard(15, 0), ConfigError);
  EXPECT_NO_THROW(gen_matching_hard(9, 0));
}

TEST(MatchHard, LargeOptimum) {
  double total = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) total += static_cast<double>(max_matching(gen_matching_hard(16, s).instance).size());
  EXPECT_GE(total / seeds / 16.0, 0.1);
}

TEST(MatchHard, OutsideItemUniform) {
  // For a fixed T, the extra item of player 0 is uniform over the 8 items outside T.
  std::vector<std::size_t> counts(8, 0);
  for (std::uint64_t s = 0; s < 4000; ++s) {
    const auto c = gen_matching_hard(16, s);
    const auto outside = set_difference(c.instance.neighbors(0), c.meta.sets.at("T"));
    ItemSet all(16);
    std::iota(all.begin(), all.end(), ItemId{0});
    const auto complement = set_difference(all, c.meta.sets.at("T"));
    const auto pos = std::lower_bound(complement.begin(), complement.end(), outside[0]) - complement.begin();
    ++counts[static_cast<std::size_t>(pos)];
  }
  EXPECT_LT(oracle::chi_square_uniform(counts), kChi7);
}

TEST(HiddenItem, ShapeAndUniformity) {
  std::vector<std::size_t> counts(4, 0);
  for (std::uint64_t s = 0; s < 4000; ++s) {
    const auto c = gen_hidden_item(8, 2, s);
    ASSERT_EQ(c.alice.size(), 4U);
    ASSERT_EQ(c.bob.size(), 3U);
    const auto outside = set_difference(c.bob, c.alice);
    ASSERT_EQ(outside, (ItemSet{c.hidden}));
    ItemSet all{0, 1, 2, 3, 4, 5, 6, 7};
    const auto complement = set_difference(all, c.alice);
    ++counts[static_cast<std::size_t>(std::lower_bound(complement.begin(), complement.end(), c.hidden) -
                                      complement.begin())];
  }
  EXPECT_LT(oracle::chi_square_uniform(counts), kChi3);
  EXPECT_THROW(gen_hidden_item(4, 2, 0), ConfigError);
}

TEST(XosHard, ShapesAndContainment) {
  const auto c = gen_xos_hard(2, 4, 9);
  ASSERT_EQ(c.players.size(), 8U);
  const auto& center = c.meta.sets.at("C");
  EXPECT_EQ(center.size(), 8U);
  const auto& petals = c.meta.set_lists.at("P");
  const auto& targets = c.meta.set_lists.at("T_i");
  for (PlayerId i = 0; i < 8; ++i) {
    const auto& v = c.players[i];
    EXPECT_EQ(v.m(), 24U);
    EXPECT_EQ(v.mu(), Rational(1));
    ASSERT_EQ(v.clause_sets().size(), 4U);
    EXPECT_EQ(petals[i].size(), 4U);
    EXPECT_TRUE(set_intersection(petals[i], center).empty());
    EXPECT_EQ(targets[i].size(), 2U);
    EXPECT_TRUE(is_subset(targets[i], petals[i]));
    EXPECT_NE(std::find(v.clause_sets().begin(), v.clause_sets().end(), targets[i]), v.clause_sets().end());
    const auto pool = set_union(center, petals[i]);
    for (const auto& clause : v.clause_sets()) {
      EXPECT_EQ(clause.size(), 2U);
      EXPECT_TRUE(is_subset(clause, pool));
    }
  }
  EXPECT_TRUE(check_feasible(c.meta.planted, 24));
  EXPECT_EQ(welfare(c.meta.planted, c.players), c.meta.planted_welfare);
}

TEST(XosHard, PlantedWelfareNearClosedForm) {
  // E|union T_i| = k^4 (1 - (1 - 1/k^3)^(k^3)) for k = 3, about 51.7.
  double total = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) total += to_double(gen_xos_hard(3, 8, s).meta.planted_welfare);
  EXPECT_NEAR(total / seeds, 51.7, 5.0);
}

TEST(SetSeeking, Shape) {
  const auto c = gen_set_seeking(3, 6, 2);
  EXPECT_EQ(c.x, 36U);
  EXPECT_EQ(c.petal.size(), 9U);
  EXPECT_EQ(c.special.size(), 3U);
  EXPECT_TRUE(is_subset(c.special, c.petal));
  ASSERT_EQ(c.family.size(), 6U);
  EXPECT_EQ(c.family[c.special_index], c.special);
  for (const auto& f : c.family) EXPECT_EQ(f.size(), 3U);
}

TEST(SetSeeking, BlindGuessBaseline) {
  // A seeker who ignores the family hits the special index with probability 1/t.
  const std::uint32_t t_sets = 4;
  std::vector<std::size_t> counts(t_sets, 0);
  int hits = 0;
  const int trials = 4000;
  Rng guess(77);
  for (int s = 0; s < trials; ++s) {
    const auto c = gen_set_seeking(2, t_sets, s);
    ++counts[c.special_index];
    if (guess.below(t_sets) == c.special_index) ++hits;
  }
  EXPECT_LT(oracle::chi_square_uniform(counts), kChi3);
  EXPECT_NEAR(static_cast<double>(hits) / trials, 1.0 / t_sets, 0.04);
}

TEST(PlantedT, WelfareAndShape) {
  const auto c = gen_planted_t_restricted(3, 4, 16, 2, 11, 5);
  ASSERT_EQ(c.players.size(), 5U);
  EXPECT_EQ(c.meta.scalars.at("t"), 4);
  EXPECT_TRUE(check_feasible(c.meta.planted, 16));
  EXPECT_EQ(c.meta.planted_welfare, Rational(12));
  EXPECT_EQ(welfare(c.meta.planted, c.players), c.meta.planted_welfare);
  for (PlayerId i = 0; i < 5; ++i) {
    EXPECT_EQ(c.players[i].clause_sets().size(), i < 3 ? 3U : 2U);
    for (const auto& clause : c.players[i].clause_sets()) EXPECT_EQ(clause.size(), 4U);
  }
  EXPECT_THROW(gen_planted_t_restricted(3, 3, 16, 0, 0), ConfigError);
  EXPECT_THROW(gen_planted_t_restricted(5, 4, 16, 0, 0), ConfigError);
  EXPECT_THROW(gen_planted_t_restricted(3, 4, 16, 0, 0, 2), ConfigError);
}

TEST(RandomXos, ShapeAndValues) {
  const auto c = gen_random_xos(3, 10, 2, 8, 4);
  ASSERT_EQ(c.players.size(), 3U);
  for (const auto& v : c.players) {
    EXPECT_EQ(v.m(), 10U);
    ASSERT_EQ(v.clauses().size(), 2U);
    for (const auto& clause : v.clauses()) {
      for (const auto& [item, value] : clause.entries()) {
        EXPECT_LT(item, 10U);
        EXPECT_GE(value, 1);
        EXPECT_LE(value, 8);
        EXPECT_EQ(value.denominator(), 1);
      }
    }
  }
}

TEST(Generators, Deterministic) {
  EXPECT_EQ(gen_matching_hard(25, 7).instance, gen_matching_hard(25, 7).instance);
  EXPECT_NE(gen_matching_hard(25, 7).instance, gen_matching_hard(25, 8).instance);
  EXPECT_EQ(gen_w_random(9, 3, 1).meta, gen_w_random(9, 3, 1).meta);
  EXPECT_EQ(gen_uniform_matching(12, 3, 2).instance, gen_uniform_matching(12, 3, 2).instance);
  EXPECT_EQ(gen_hidden_item(10, 2, 3), gen_hidden_item(10, 2, 3));
  EXPECT_EQ(gen_xos_hard(2, 3, 4).players, gen_xos_hard(2, 3, 4).players);
  EXPECT_EQ(gen_set_seeking(2, 3, 5), gen_set_seeking(2, 3, 5));
  EXPECT_EQ(gen_planted_t_restricted(2, 4, 12, 1, 6).players, gen_planted_t_restricted(2, 4, 12, 1, 6).players);
  EXPECT_EQ(gen_random_xos(2, 6, 2, 5, 7).players, gen_random_xos(2, 6, 2, 5, 7).players);
}

TEST(UniformMatching, Degree) {
  const auto c = gen_uniform_matching(20, 3, 1);
  for (PlayerId i = 0; i < 20; ++i) EXPECT_EQ(c.instance.neighbors(i).size(), 3U);
  EXPECT_THROW(gen_uniform_matching(2, 3, 0), ConfigError);
}
