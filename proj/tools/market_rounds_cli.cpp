// market-rounds: generate instances, run protocols, compute optima and drive seeded batches.
//
// Exit codes: 0 ok, 1 configuration or input error, 2 run failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "market_rounds/ca_reductions.hpp"
#include "market_rounds/harness.hpp"
#include "market_rounds/matching_protocols.hpp"
#include "market_rounds/welfare_oracle.hpp"

namespace mr = market_rounds;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRunFailure = 2;

struct RunFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const mr::Json& doc, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << doc.dump(2) << '\n';
  } else {
    mr::write_json_file(out, doc);
  }
}

mr::Json transcript_json(const mr::Transcript& t, bool full) {
  return full ? mr::to_json(t) : mr::transcript_summary(t);
}

// gen ----------------------------------------------------------------------

struct GenArgs {
  std::string dist;
  std::string params;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen(const GenArgs& a) {
  emit(mr::generate_json(mr::parse_distribution(a.dist, a.params), a.seed), a.out);
  return kOk;
}

// match --------------------------------------------------------------------

struct MatchArgs {
  std::string algo = "auction";
  std::string input;
  std::string delta = "1/4";
  std::uint32_t k = 1;
  std::optional<std::uint64_t> bits;
  std::optional<std::uint64_t> lprime;
  std::optional<std::uint64_t> max_rounds;
  std::uint64_t seed = 0;
  std::string out;
  bool keep_transcript = false;
};

int run_match(const MatchArgs& a) {
  const auto doc = mr::read_instance(a.input);
  if (doc.kind != mr::InstanceKind::Matching) throw mr::ConfigError("match needs a matching instance");
  const auto& inst = doc.matching;

  mr::Json result{{"algorithm", a.algo}, {"n", inst.n()}, {"seed", a.seed}};
  const mr::Transcript* transcript = nullptr;
  mr::Matching matching;

  mr::MatchingRun simul;
  mr::AuctionResult auction;
  mr::KRoundMatchingResult kround;
  mr::ExactMatchingResult exact;
  if (a.algo == "simul-det") {
    std::uint64_t budget = 0;
    if (a.bits) {
      budget = *a.bits;
    } else if (a.lprime) {
      budget = *a.lprime * mr::index_bits(inst.n());
    } else {
      throw mr::ConfigError("simul-det needs --l or --lprime");
    }
    simul = mr::simultaneous_deterministic_matching(inst, budget);
    matching = simul.matching;
    transcript = &simul.transcript;
    result["bit_budget"] = budget;
  } else if (a.algo == "auction") {
    mr::AuctionConfig config;
    config.delta = mr::parse_rational(a.delta);
    config.max_rounds = a.max_rounds;
    auction = mr::auction_matching(inst, config, a.seed);
    matching = auction.matching;
    transcript = &auction.transcript;
    result["delta"] = mr::to_string(config.delta);
    result["round_budget"] = auction.round_budget;
    result["stop"] = mr::to_string(auction.stop);
    result["satisfied"] = auction.satisfied_count;
  } else if (a.algo == "k-round") {
    kround = mr::k_round_matching(inst, a.k, a.seed);
    matching = kround.matching;
    transcript = &kround.transcript;
    result["k"] = a.k;
  } else if (a.algo == "exact") {
    exact = mr::exact_matching_protocol(inst, a.seed);
    matching = exact.matching;
    transcript = &exact.transcript;
    result["auction_size"] = exact.auction_size;
    result["auction_rounds"] = exact.auction_rounds;
    result["augmentations"] = exact.augmentations;
  } else {
    throw mr::ConfigError("unknown matching algorithm '" + a.algo + "'");
  }
  result["matching"] = mr::to_json(matching);
  result["rounds_used"] = a.algo == "auction" ? auction.rounds_used : transcript->total_rounds();
  result["transcript"] = transcript_json(*transcript, a.keep_transcript);
  emit(result, a.out);
  return kOk;
}

// ca -----------------------------------------------------------------------

struct CaArgs {
  std::string algo = "simul";
  std::string input;
  std::uint32_t t = 2;
  std::uint32_t k = 1;
  std::string mode = "auto";
  std::size_t cap = mr::kDefaultProxyCap;
  std::uint64_t seed = 0;
  std::string out;
  bool keep_transcript = false;
};

int run_ca(const CaArgs& a) {
  const auto doc = mr::read_instance(a.input);
  if (doc.kind != mr::InstanceKind::BinaryXos) throw mr::ConfigError("ca needs a binary-xos instance");
  mr::Json result{{"algorithm", a.algo}, {"t", a.t}, {"seed", a.seed}};
  mr::Allocation alloc;
  if (a.algo == "simul") {
    auto run = mr::simultaneous_t_restricted(doc.binary, a.t, mr::parse_proxy_mode(a.mode), a.cap);
    alloc = run.allocation;
    result["greedy"] = run.greedy;
    result["transcript"] = transcript_json(run.transcript, a.keep_transcript);
  } else if (a.algo == "k-round") {
    auto run = mr::k_round_t_restricted(doc.binary, a.t, a.k);
    alloc = run.allocation;
    result["k"] = a.k;
    result["transcript"] = transcript_json(run.transcript, a.keep_transcript);
  } else {
    throw mr::ConfigError("unknown ca algorithm '" + a.algo + "'");
  }
  result["allocation"] = mr::to_json(alloc);
  result["welfare"] = mr::rational_to_json(mr::welfare(alloc, doc.binary));
  emit(result, a.out);
  return kOk;
}

// ca-pipeline --------------------------------------------------------------

struct PipelineArgs {
  std::string input;
  std::string inner = "simul";
  std::uint32_t k = 2;
  std::string mode = "auto";
  std::size_t cap = mr::kDefaultProxyCap;
  std::uint64_t seed = 0;
  std::string out;
  bool keep_transcript = false;
  bool cells = false;
};

int run_pipeline(const PipelineArgs& a) {
  const auto doc = mr::read_instance(a.input);
  const auto players = doc.as_xos();
  mr::PipelineConfig config;
  if (a.inner == "simul") {
    config.inner = mr::InnerAlgorithm::Simultaneous;
  } else if (a.inner == "k-round") {
    config.inner = mr::InnerAlgorithm::KRound;
  } else {
    throw mr::ConfigError("--inner must be simul or k-round");
  }
  config.k = a.k;
  config.mode = mr::parse_proxy_mode(a.mode);
  config.cap = a.cap;
  const auto run = mr::run_xos_pipeline(players, config);

  mr::Json result{{"inner", mr::to_string(config.inner)},
                  {"seed", a.seed},
                  {"chosen_mu", mr::rational_to_json(run.chosen_mu)},
                  {"chosen_t", run.chosen_t},
                  {"welfare", mr::rational_to_json(run.welfare)},
                  {"greedy", run.any_greedy},
                  {"allocation", mr::to_json(run.allocation)},
                  {"transcript", transcript_json(run.transcript, a.keep_transcript)}};
  if (config.inner == mr::InnerAlgorithm::KRound) result["k"] = a.k;
  if (a.cells) {
    mr::Json cells = mr::Json::array();
    for (const auto& c : run.cells) {
      cells.push_back({{"mu", mr::rational_to_json(c.mu)},
                       {"t", c.t},
                       {"bundle_size", c.bundle_size},
                       {"welfare", mr::rational_to_json(c.welfare)},
                       {"greedy", c.greedy}});
    }
    result["cells"] = std::move(cells);
  }
  emit(result, a.out);
  return kOk;
}

// opt ----------------------------------------------------------------------

int run_opt(const std::string& input, const std::string& out) {
  const auto doc = mr::read_instance(input);
  mr::Json result;
  if (doc.kind == mr::InstanceKind::Matching) {
    const auto matching = mr::max_matching(doc.matching);
    const auto cert = mr::emit_certificate(doc.matching, matching);
    if (!cert || !mr::verify_certificate(doc.matching, matching, *cert)) {
      throw RunFailure("certificate for the maximum matching did not verify");
    }
    result = {{"kind", "matching"}, {"size", matching.size()}, {"matching", mr::to_json(matching)},
              {"certificate", mr::to_json(*cert)}};
  } else {
    const auto opt = mr::optimal_welfare(doc.as_xos());
    result = {{"kind", mr::to_string(doc.kind)}, {"welfare", mr::rational_to_json(opt.value)},
              {"allocation", mr::to_json(opt.allocation)}};
  }
  emit(result, out);
  return kOk;
}

// batch / compare ----------------------------------------------------------

struct BatchArgs {
  std::string config;
  std::string dist;
  std::string params;
  std::vector<std::string> algos;
  std::uint64_t first_seed = 0;
  std::uint64_t seeds = 1;
  unsigned threads = 1;
  std::string opt;
  std::string csv;
  std::string json;
  bool keep_transcripts = false;
};

mr::ExperimentConfig build_config(const BatchArgs& a, const CLI::App& cmd) {
  mr::ExperimentConfig config;
  if (!a.config.empty()) {
    config = mr::config_from_json(mr::read_json_file(a.config));
  }
  if (!a.dist.empty()) config.distribution = mr::parse_distribution(a.dist, a.params);
  if (!a.algos.empty()) {
    config.algorithms.clear();
    for (const auto& s : a.algos) config.algorithms.push_back(mr::parse_algo_spec(s));
  }
  if (cmd.count("--first-seed") > 0) config.first_seed = a.first_seed;
  if (cmd.count("--seeds") > 0) config.seed_count = a.seeds;
  if (cmd.count("--threads") > 0) config.threads = a.threads;
  if (!a.opt.empty()) config.opt = mr::parse_opt_policy(a.opt);
  if (!a.csv.empty()) config.csv_path = a.csv;
  if (!a.json.empty()) config.json_path = a.json;
  if (a.keep_transcripts) config.keep_transcripts = true;
  if (config.distribution.name.empty()) throw mr::ConfigError("no distribution given (--config or --dist)");
  config.validate();
  return config;
}

void print_stat(const char* name, const mr::Stat& s) {
  std::cout << "  " << name << ": mean " << s.mean << "  min " << s.min << "  max " << s.max << "  stderr " << s.stderr_
            << '\n';
}

int run_batch_cmd(const BatchArgs& a, const CLI::App& cmd) {
  const auto config = build_config(a, cmd);
  const auto report = mr::run_batch(config);
  std::cout << report.algorithm << " on " << config.distribution.name << ", " << report.records.size() << " seeds, "
            << report.failed << " failed\n";
  print_stat("welfare", report.alg_welfare);
  print_stat("ratio", report.ratio);
  print_stat("total bits", report.total_bits);
  for (const auto& rec : report.records) {
    if (!rec.ok) std::cerr << "seed " << rec.seed << ": " << rec.error << '\n';
  }
  return report.failed == 0 ? kOk : kRunFailure;
}

int run_compare_cmd(const BatchArgs& a, const CLI::App& cmd) {
  const auto config = build_config(a, cmd);
  const auto report = mr::compare_algos(config);
  std::size_t failed = 0;
  for (const auto& r : report.reports) {
    std::cout << r.algorithm << ": welfare " << r.alg_welfare.mean << " (stderr " << r.alg_welfare.stderr_
              << "), ratio " << r.ratio.mean << ", failed " << r.failed << '\n';
    failed += r.failed;
  }
  for (const auto& d : report.deltas) {
    std::cout << d.other << " - " << d.baseline << ": welfare " << d.welfare_delta.mean << " (stderr "
              << d.welfare_delta.stderr_ << "), ratio " << d.ratio_delta.mean << '\n';
  }
  return failed == 0 ? kOk : kRunFailure;
}

void add_batch_options(CLI::App* cmd, BatchArgs& a) {
  cmd->add_option("--config", a.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--dist", a.dist, "distribution name");
  cmd->add_option("--params", a.params, "distribution parameters, e.g. n=16,w=4");
  cmd->add_option("--algo", a.algos, "algorithm spec, e.g. k-round:k=2 (repeatable)");
  cmd->add_option("--first-seed", a.first_seed, "first seed");
  cmd->add_option("--seeds", a.seeds, "number of seeds");
  cmd->add_option("--threads", a.threads, "worker threads (0 = all cores)");
  cmd->add_option("--opt", a.opt, "optimum policy: auto|exact|planted|none");
  cmd->add_option("--csv", a.csv, "CSV output path");
  cmd->add_option("--json", a.json, "JSON output path");
  cmd->add_flag("--keep-transcripts", a.keep_transcripts, "include full transcripts in the JSON output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Round-based allocation protocols for matching and XOS auctions"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a seeded instance");
  gen_cmd->add_option("--dist", gen.dist, "w-random|match-hard|uniform|identity|hidden-item|xos-hard|set-seek|planted-t|random-xos")
      ->required();
  gen_cmd->add_option("--params", gen.params, "comma-separated key=value integers");
  gen_cmd->add_option("--seed", gen.seed, "seed");
  gen_cmd->add_option("--out", gen.out, "output path (default stdout)");

  MatchArgs match;
  auto* match_cmd = app.add_subcommand("match", "run a matching protocol");
  match_cmd->add_option("--algo", match.algo, "simul-det|auction|k-round|exact")
      ->check(CLI::IsMember({"simul-det", "auction", "k-round", "exact"}));
  match_cmd->add_option("--input", match.input, "matching instance JSON")->required()->check(CLI::ExistingFile);
  match_cmd->add_option("--delta", match.delta, "auction price increment 1/q");
  match_cmd->add_option("--k", match.k, "rounds for k-round");
  match_cmd->add_option("--l", match.bits, "simul-det bit budget per player");
  match_cmd->add_option("--lprime", match.lprime, "simul-det indices per player");
  match_cmd->add_option("--max-rounds", match.max_rounds, "auction round budget");
  match_cmd->add_option("--seed", match.seed, "seed");
  match_cmd->add_option("--out", match.out, "output path (default stdout)");
  match_cmd->add_flag("--keep-transcript", match.keep_transcript, "include every message");

  CaArgs ca;
  auto* ca_cmd = app.add_subcommand("ca", "run a t-restricted auction protocol");
  ca_cmd->add_option("--algo", ca.algo, "simul|k-round")->check(CLI::IsMember({"simul", "k-round"}));
  ca_cmd->add_option("--input", ca.input, "binary-xos instance JSON")->required()->check(CLI::ExistingFile);
  ca_cmd->add_option("--t", ca.t, "bundle size parameter (power of two)");
  ca_cmd->add_option("--k", ca.k, "rounds for k-round");
  ca_cmd->add_option("--mode", ca.mode, "proxy optimizer: exact|greedy|auto");
  ca_cmd->add_option("--cap", ca.cap, "largest bundle count for the exact optimizer");
  ca_cmd->add_option("--seed", ca.seed, "seed (recorded; the protocols are deterministic)");
  ca_cmd->add_option("--out", ca.out, "output path (default stdout)");
  ca_cmd->add_flag("--keep-transcript", ca.keep_transcript, "include every message");

  PipelineArgs pipe;
  auto* pipe_cmd = app.add_subcommand("ca-pipeline", "run the XOS reduction pipeline");
  pipe_cmd->add_option("--input", pipe.input, "xos or binary-xos instance JSON")->required()->check(CLI::ExistingFile);
  pipe_cmd->add_option("--inner", pipe.inner, "simul|k-round")->check(CLI::IsMember({"simul", "k-round"}));
  pipe_cmd->add_option("--k", pipe.k, "rounds for the k-round inner algorithm");
  pipe_cmd->add_option("--mode", pipe.mode, "proxy optimizer: exact|greedy|auto");
  pipe_cmd->add_option("--cap", pipe.cap, "largest bundle count for the exact optimizer");
  pipe_cmd->add_option("--seed", pipe.seed, "seed (recorded; the pipeline is deterministic)");
  pipe_cmd->add_option("--out", pipe.out, "output path (default stdout)");
  pipe_cmd->add_flag("--keep-transcript", pipe.keep_transcript, "include every message");
  pipe_cmd->add_flag("--cells", pipe.cells, "list every (mu, t) run");

  std::string opt_input, opt_out;
  auto* opt_cmd = app.add_subcommand("opt", "exact optimum of an instance");
  opt_cmd->add_option("--input", opt_input, "instance JSON")->required()->check(CLI::ExistingFile);
  opt_cmd->add_option("--out", opt_out, "output path (default stdout)");

  BatchArgs batch;
  auto* batch_cmd = app.add_subcommand("batch", "run one algorithm over a seed range");
  add_batch_options(batch_cmd, batch);

  BatchArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "run several algorithms on the same seeds");
  add_batch_options(compare_cmd, compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*match_cmd) return run_match(match);
    if (*ca_cmd) return run_ca(ca);
    if (*pipe_cmd) return run_pipeline(pipe);
    if (*opt_cmd) return run_opt(opt_input, opt_out);
    if (*batch_cmd) return run_batch_cmd(batch, *batch_cmd);
    if (*compare_cmd) return run_compare_cmd(compare, *compare_cmd);
  } catch (const mr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const mr::DomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "run failure: " << e.what() << '\n';
    return kRunFailure;
  }
  return kOk;
}
