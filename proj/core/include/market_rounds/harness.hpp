#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "market_rounds/ca_protocols.hpp"
#include "market_rounds/json_io.hpp"

namespace market_rounds {

inline constexpr const char* kCsvSchema = "market-rounds/batch-v1";

/// Instance family and its integer parameters, e.g. {"match-hard", {{"n", 16}}}.
struct DistributionSpec {
  std::string name;
  std::map<std::string, std::int64_t> params;
};

/// Protocol plus its knobs. Only the fields the named protocol reads are consulted.
///   matching: simul-det (lprime or l), auction (delta, max_rounds), k-round (k), exact
///   binary XOS: ca-simul (t, mode, cap), ca-k-round (t, k)
///   general XOS: pipeline-simul (mode, cap), pipeline-k-round (k)
struct AlgoSpec {
  std::string name;
  Rational delta{1, 4};
  std::uint32_t k = 1;
  std::optional<std::uint64_t> bits;    // l, simul-det bit budget
  std::optional<std::uint64_t> lprime;  // indices per player, simul-det
  std::uint32_t t = 0;
  ProxyMode mode = ProxyMode::Auto;
  std::size_t cap = kDefaultProxyCap;
  std::optional<std::uint64_t> max_rounds;

  /// Short stable label such as "k-round(k=2)".
  [[nodiscard]] std::string label() const;
};

enum class OptPolicy { Auto, Exact, Planted, None };

struct ExperimentConfig {
  DistributionSpec distribution;
  std::vector<AlgoSpec> algorithms;  // batch uses the first; compare uses all
  std::uint64_t first_seed = 0;
  std::uint64_t seed_count = 1;
  unsigned threads = 1;              // 0 means hardware concurrency
  OptPolicy opt = OptPolicy::Auto;
  std::uint32_t exact_item_limit = 12;  // Auto uses the exact XOS oracle up to this many items
  bool keep_transcripts = false;
  std::optional<std::filesystem::path> csv_path;
  std::optional<std::filesystem::path> json_path;

  /// Checks every name and parameter and builds the first seed's instance. Throws ConfigError.
  void validate() const;
};

ExperimentConfig config_from_json(const Json& doc);
/// "k-round:k=2" or "auction:delta=1/4,max_rounds=100"; keys as in the JSON config.
AlgoSpec parse_algo_spec(const std::string& text);
/// Echo of the fields that determine the output (threads and paths excluded).
Json to_json(const ExperimentConfig& config);
/// Instance document (with "meta") for any distribution, including the two-party
/// hidden-item (n, k) and set-seek (k, t_sets) inputs, which batch runs do not use.
Json generate_json(const DistributionSpec& spec, std::uint64_t seed);
DistributionSpec parse_distribution(const std::string& name, const std::string& params);
OptPolicy parse_opt_policy(std::string_view text);
const char* to_string(OptPolicy policy);

struct SeedRecord {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Rational alg_welfare;
  std::optional<Rational> opt;
  std::string opt_kind;  // exact | planted-lower-bound | none
  std::optional<double> ratio;  // OPT / ALG
  std::uint64_t rounds = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t max_player_bits = 0;
  bool bit_check = false;  // transcript bits recompute from payloads
  bool greedy = false;     // a greedy proxy optimizer was used somewhere
  std::optional<Json> transcript;
};

struct Stat {
  std::size_t count = 0;
  double mean = 0, min = 0, max = 0, stddev = 0, stderr_ = 0;
};
Stat summarize(std::span<const double> values);

struct ExperimentReport {
  std::string algorithm;
  std::vector<SeedRecord> records;  // ordered by seed
  std::size_t failed = 0;
  Stat alg_welfare, opt, ratio, rounds, total_bits, max_player_bits;
};

/// Runs one seed of one algorithm. Errors are captured in the record, not thrown.
SeedRecord run_seed(const ExperimentConfig& config, const AlgoSpec& algo, std::uint64_t seed);

/// Runs every seed of algorithms[0] on a worker pool, merges in seed order and writes the
/// configured CSV / JSON files.
ExperimentReport run_batch(const ExperimentConfig& config);

struct PairedDelta {
  std::string baseline;
  std::string other;
  Stat welfare_delta;  // other - baseline, per seed
  Stat ratio_delta;
};

struct CompareReport {
  std::vector<ExperimentReport> reports;  // one per algorithm, same seeds
  std::vector<PairedDelta> deltas;        // every algorithm against the first
};

/// Same seeds across all listed algorithms (at least two).
CompareReport compare_algos(const ExperimentConfig& config);

std::string to_csv(const ExperimentReport& report);
/// One row per seed with welfare and ratio columns for every algorithm.
std::string to_csv(const CompareReport& report);
Json to_json(const ExperimentReport& report, const ExperimentConfig& config);
Json to_json(const CompareReport& report, const ExperimentConfig& config);

}  // namespace market_rounds
