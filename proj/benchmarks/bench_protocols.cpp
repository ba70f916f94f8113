#include <benchmark/benchmark.h>

#include "market_rounds/ca_protocols.hpp"
#include "market_rounds/ca_reductions.hpp"
#include "market_rounds/instance_gen.hpp"
#include "market_rounds/matching_oracle.hpp"
#include "market_rounds/matching_protocols.hpp"

using namespace market_rounds;

static void BM_MaxMatching(benchmark::State& state) {
  const auto inst = gen_uniform_matching(static_cast<std::uint32_t>(state.range(0)), 3, 1).instance;
  for (auto _ : state) benchmark::DoNotOptimize(max_matching(inst));
}
BENCHMARK(BM_MaxMatching)->RangeMultiplier(4)->Range(16, 1024);

static void BM_Auction(benchmark::State& state) {
  const auto inst = gen_uniform_matching(static_cast<std::uint32_t>(state.range(0)), 3, 2).instance;
  AuctionConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(auction_matching(inst, config, 7));
}
BENCHMARK(BM_Auction)->RangeMultiplier(4)->Range(16, 1024);

static void BM_ExactProtocol(benchmark::State& state) {
  const auto inst = gen_uniform_matching(static_cast<std::uint32_t>(state.range(0)), 3, 3).instance;
  for (auto _ : state) benchmark::DoNotOptimize(exact_matching_protocol(inst, 7));
}
BENCHMARK(BM_ExactProtocol)->RangeMultiplier(4)->Range(16, 256);

static void BM_ProxyOptimizer(benchmark::State& state) {
  const auto c = gen_planted_t_restricted(static_cast<std::uint32_t>(state.range(0)), 4, 64, 3, 4);
  std::vector<BinaryXOSValuation> proxies;
  ItemSet all(64);
  for (ItemId j = 0; j < 64; ++j) all[j] = j;
  for (const auto& v : c.players) proxies.push_back(make_proxy(report_maximal_disjoint_bundles(v, 2, all), 64));
  for (auto _ : state) benchmark::DoNotOptimize(best_allocation_wrt_proxy(proxies, 64, ProxyMode::Auto));
}
BENCHMARK(BM_ProxyOptimizer)->DenseRange(2, 8, 2);

static void BM_Pipeline(benchmark::State& state) {
  const auto c = gen_xos_hard(static_cast<std::uint32_t>(state.range(0)), 8, 5);
  std::vector<XOSValuation> players;
  for (const auto& v : c.players) players.push_back(v.to_xos());
  PipelineConfig config;
  config.inner = state.range(1) == 0 ? InnerAlgorithm::Simultaneous : InnerAlgorithm::KRound;
  for (auto _ : state) benchmark::DoNotOptimize(run_xos_pipeline(players, config));
}
BENCHMARK(BM_Pipeline)->Args({2, 0})->Args({2, 1})->Args({3, 0})->Args({3, 1})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
