#include "market_rounds/harness.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include "market_rounds/ca_reductions.hpp"
#include "market_rounds/instance_gen.hpp"
#include "market_rounds/matching_protocols.hpp"
#include "market_rounds/rng.hpp"
#include "market_rounds/welfare_oracle.hpp"

namespace market_rounds {
namespace {

using Instance = std::variant<MatchingCase, BinaryXosCase, XosCase>;

struct ParamSpec {
  const char* name;
  std::optional<std::int64_t> fallback;  // nullopt means required
};

struct DistInfo {
  const char* name;
  InstanceKind kind;
  std::vector<ParamSpec> params;
};

const std::vector<DistInfo>& distributions() {
  static const std::vector<DistInfo> table = {
      {"w-random", InstanceKind::Matching, {{"n", {}}, {"w", {}}}},
      {"match-hard", InstanceKind::Matching, {{"n", {}}}},
      {"uniform", InstanceKind::Matching, {{"n", {}}, {"d", 3}}},
      {"identity", InstanceKind::Matching, {{"n", {}}}},
      {"xos-hard", InstanceKind::BinaryXos, {{"k", {}}, {"t_sets", {}}}},
      {"planted-t", InstanceKind::BinaryXos, {{"n_active", {}}, {"t", {}}, {"m", {}}, {"extra", 0}, {"n_players", 0}}},
      {"random-xos", InstanceKind::Xos, {{"n", {}}, {"m", {}}, {"clauses", 2}, {"max_value", 8}}},
  };
  return table;
}

const DistInfo& find_distribution(const std::string& name) {
  for (const auto& d : distributions()) {
    if (name == d.name) return d;
  }
  throw ConfigError("unknown distribution '" + name + "'");
}

// Resolved parameters with defaults filled in; rejects unknown or missing names.
std::map<std::string, std::int64_t> resolve(const DistributionSpec& spec) {
  const auto& info = find_distribution(spec.name);
  std::map<std::string, std::int64_t> out;
  for (const auto& p : info.params) {
    auto it = spec.params.find(p.name);
    if (it != spec.params.end()) {
      out[p.name] = it->second;
    } else if (p.fallback) {
      out[p.name] = *p.fallback;
    } else {
      throw ConfigError("distribution '" + spec.name + "' needs parameter '" + p.name + "'");
    }
    if (out[p.name] < 0 || out[p.name] > std::numeric_limits<std::uint32_t>::max()) {
      throw ConfigError(std::string("parameter '") + p.name + "' out of range");
    }
  }
  for (const auto& [k, v] : spec.params) {
    if (!out.contains(k)) throw ConfigError("distribution '" + spec.name + "' has no parameter '" + k + "'");
  }
  return out;
}

Instance generate(const DistributionSpec& spec, std::uint64_t seed) {
  const auto p = resolve(spec);
  auto u = [&](const char* key) { return static_cast<std::uint32_t>(p.at(key)); };
  const auto& name = spec.name;
  if (name == "w-random") return gen_w_random(u("n"), u("w"), seed);
  if (name == "match-hard") return gen_matching_hard(u("n"), seed);
  if (name == "uniform") return gen_uniform_matching(u("n"), u("d"), seed);
  if (name == "identity") {
    MatchingCase c{MatchingInstance::identity(u("n")), {}};
    c.meta.planted = Allocation(u("n"));
    for (std::uint32_t i = 0; i < u("n"); ++i) c.meta.planted.bundles[i] = {i};
    c.meta.planted_welfare = Rational(u("n"));
    return c;
  }
  if (name == "xos-hard") return gen_xos_hard(u("k"), u("t_sets"), seed);
  if (name == "planted-t") return gen_planted_t_restricted(u("n_active"), u("t"), u("m"), u("extra"), seed, u("n_players"));
  return gen_random_xos(u("n"), u("m"), u("clauses"), u("max_value"), seed);
}

enum class AlgoFamily { Matching, BinaryCa, Pipeline };

AlgoFamily family_of(const std::string& name) {
  static const std::set<std::string> matching{"simul-det", "auction", "k-round", "exact"};
  if (matching.contains(name)) return AlgoFamily::Matching;
  if (name == "ca-simul" || name == "ca-k-round") return AlgoFamily::BinaryCa;
  if (name == "pipeline-simul" || name == "pipeline-k-round") return AlgoFamily::Pipeline;
  throw ConfigError("unknown algorithm '" + name + "'");
}

void validate_algo(const AlgoSpec& algo, InstanceKind kind) {
  const auto family = family_of(algo.name);
  if (family == AlgoFamily::Matching && kind != InstanceKind::Matching) {
    throw ConfigError("algorithm '" + algo.name + "' needs a matching distribution");
  }
  if (family == AlgoFamily::BinaryCa && kind != InstanceKind::BinaryXos) {
    throw ConfigError("algorithm '" + algo.name + "' needs a binary XOS distribution");
  }
  if (family == AlgoFamily::Pipeline && kind == InstanceKind::Matching) {
    throw ConfigError("algorithm '" + algo.name + "' needs an XOS distribution");
  }
  if (algo.name == "auction") {
    unit_fraction_denominator(algo.delta);
    if (algo.max_rounds && *algo.max_rounds == 0) throw ConfigError("max_rounds must be at least 1");
  }
  if (algo.name == "simul-det" && !algo.bits && !algo.lprime) {
    throw ConfigError("simul-det needs a bit budget 'l' or an index count 'lprime'");
  }
  if ((algo.name == "k-round" || algo.name == "ca-k-round" || algo.name == "pipeline-k-round") && algo.k < 1) {
    throw ConfigError("k must be at least 1");
  }
  if (algo.name == "ca-simul" || algo.name == "ca-k-round") {
    if (!is_power_of_two(algo.t)) throw ConfigError("t must be a power of two");
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

Json double_json(double x) {
  if (!std::isfinite(x)) return format_double(x);
  return x;
}

Json stat_json(const Stat& s) {
  return Json{{"count", s.count}, {"mean", double_json(s.mean)}, {"min", double_json(s.min)},
              {"max", double_json(s.max)}, {"stddev", double_json(s.stddev)}, {"stderr", double_json(s.stderr_)}};
}

double ratio_of(const Rational& opt, const Rational& alg) {
  if (alg == Rational(0)) return opt == Rational(0) ? 1.0 : std::numeric_limits<double>::infinity();
  return to_double(opt / alg);
}

struct Outcome {
  Rational welfare;
  const Transcript* transcript = nullptr;
  bool greedy = false;
};

// Keeps protocol randomness independent of the generator streams for the same seed.
std::uint64_t protocol_seed(std::uint64_t seed) { return mix64(seed ^ 0x70726f746f636f6cULL); }

template <typename Players>
std::pair<std::optional<Rational>, std::string> xos_opt(const ExperimentConfig& config, const Players& players,
                                                        const PlantedMeta& meta, std::uint32_t m) {
  const bool planted = !meta.planted.bundles.empty() && meta.planted_welfare > 0;
  switch (config.opt) {
    case OptPolicy::None: return {std::nullopt, "none"};
    case OptPolicy::Exact: return {optimal_welfare(players).value, "exact"};
    case OptPolicy::Planted:
      if (!planted) return {std::nullopt, "none"};
      return {meta.planted_welfare, "planted-lower-bound"};
    case OptPolicy::Auto:
      if (m <= config.exact_item_limit) return {optimal_welfare(players).value, "exact"};
      if (planted) return {meta.planted_welfare, "planted-lower-bound"};
      return {std::nullopt, "none"};
  }
  return {std::nullopt, "none"};
}

void fill_from_transcript(SeedRecord& rec, const Transcript& t, bool keep) {
  rec.rounds = t.total_rounds();
  rec.total_bits = t.total_bits();
  rec.max_player_bits = t.max_player_bits();
  rec.bit_check = t.verify();
  if (keep) rec.transcript = to_json(t);
}

void run_matching(SeedRecord& rec, const ExperimentConfig& config, const AlgoSpec& algo, const MatchingCase& c,
                  std::uint64_t seed) {
  const auto& inst = c.instance;
  Matching out;
  if (algo.name == "simul-det") {
    const auto budget = algo.bits ? *algo.bits : *algo.lprime * index_bits(inst.n());
    auto run = simultaneous_deterministic_matching(inst, budget);
    out = run.matching;
    fill_from_transcript(rec, run.transcript, config.keep_transcripts);
  } else if (algo.name == "auction") {
    AuctionConfig ac;
    ac.delta = algo.delta;
    ac.max_rounds = algo.max_rounds;
    auto run = auction_matching(inst, ac, protocol_seed(seed));
    out = run.matching;
    fill_from_transcript(rec, run.transcript, config.keep_transcripts);
    rec.rounds = run.rounds_used;
  } else if (algo.name == "k-round") {
    auto run = k_round_matching(inst, algo.k, protocol_seed(seed));
    out = run.matching;
    fill_from_transcript(rec, run.transcript, config.keep_transcripts);
  } else {
    auto run = exact_matching_protocol(inst, protocol_seed(seed));
    out = run.matching;
    fill_from_transcript(rec, run.transcript, config.keep_transcripts);
  }
  if (!is_valid_matching(inst, out)) throw std::logic_error("protocol returned an infeasible matching");
  rec.alg_welfare = Rational(static_cast<std::int64_t>(out.size()));
  switch (config.opt) {
    case OptPolicy::None:
      rec.opt_kind = "none";
      break;
    case OptPolicy::Planted:
      if (c.meta.planted_welfare > 0) {
        rec.opt = c.meta.planted_welfare;
        rec.opt_kind = "planted-lower-bound";
      } else {
        rec.opt_kind = "none";
      }
      break;
    default:
      rec.opt = Rational(static_cast<std::int64_t>(max_matching(inst).size()));
      rec.opt_kind = "exact";
  }
}

void run_binary(SeedRecord& rec, const ExperimentConfig& config, const AlgoSpec& algo, const BinaryXosCase& c) {
  const auto m = c.players.empty() ? 0U : c.players.front().m();
  Allocation alloc;
  if (algo.name == "ca-simul") {
    auto run = simultaneous_t_restricted(c.players, algo.t, algo.mode, algo.cap);
    alloc = std::move(run.allocation);
    rec.greedy = run.greedy;
    fill_from_transcript(rec, run.transcript, config.keep_transcripts);
  } else if (algo.name == "ca-k-round") {
    auto run = k_round_t_restricted(c.players, algo.t, algo.k);
    alloc = std::move(run.allocation);
    fill_from_transcript(rec, run.transcript, config.keep_transcripts);
  } else {
    std::vector<XOSValuation> xos;
    for (const auto& v : c.players) xos.push_back(v.to_xos());
    PipelineConfig pc;
    pc.inner = algo.name == "pipeline-simul" ? InnerAlgorithm::Simultaneous : InnerAlgorithm::KRound;
    pc.k = algo.k;
    pc.mode = algo.mode;
    pc.cap = algo.cap;
    auto run = run_xos_pipeline(xos, pc);
    alloc = std::move(run.allocation);
    rec.greedy = run.any_greedy;
    fill_from_transcript(rec, run.transcript, config.keep_transcripts);
  }
  rec.alg_welfare = welfare(alloc, c.players);
  auto [opt, kind] = xos_opt(config, std::span<const BinaryXOSValuation>(c.players), c.meta, m);
  rec.opt = opt;
  rec.opt_kind = kind;
}

void run_xos(SeedRecord& rec, const ExperimentConfig& config, const AlgoSpec& algo, const XosCase& c) {
  const auto m = c.players.empty() ? 0U : c.players.front().m();
  PipelineConfig pc;
  pc.inner = algo.name == "pipeline-simul" ? InnerAlgorithm::Simultaneous : InnerAlgorithm::KRound;
  pc.k = algo.k;
  pc.mode = algo.mode;
  pc.cap = algo.cap;
  auto run = run_xos_pipeline(c.players, pc);
  rec.greedy = run.any_greedy;
  fill_from_transcript(rec, run.transcript, config.keep_transcripts);
  rec.alg_welfare = welfare(run.allocation, c.players);
  auto [opt, kind] = xos_opt(config, std::span<const XOSValuation>(c.players), c.meta, m);
  rec.opt = opt;
  rec.opt_kind = kind;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (auto i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
}

ExperimentReport assemble(const std::string& label, std::vector<SeedRecord> records) {
  ExperimentReport report;
  report.algorithm = label;
  std::vector<double> w, o, r, rounds, bits, maxbits;
  for (const auto& rec : records) {
    if (!rec.ok) {
      ++report.failed;
      continue;
    }
    w.push_back(to_double(rec.alg_welfare));
    if (rec.opt) o.push_back(to_double(*rec.opt));
    if (rec.ratio) r.push_back(*rec.ratio);
    rounds.push_back(static_cast<double>(rec.rounds));
    bits.push_back(static_cast<double>(rec.total_bits));
    maxbits.push_back(static_cast<double>(rec.max_player_bits));
  }
  report.alg_welfare = summarize(w);
  report.opt = summarize(o);
  report.ratio = summarize(r);
  report.rounds = summarize(rounds);
  report.total_bits = summarize(bits);
  report.max_player_bits = summarize(maxbits);
  report.records = std::move(records);
  return report;
}

ExperimentReport run_one(const ExperimentConfig& config, const AlgoSpec& algo) {
  std::vector<SeedRecord> records(config.seed_count);
  parallel_for(records.size(), config.threads,
               [&](std::size_t i) { records[i] = run_seed(config, algo, config.first_seed + i); });
  return assemble(algo.label(), std::move(records));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

Json record_json(const SeedRecord& rec) {
  Json j{{"seed", rec.seed}, {"status", rec.ok ? "ok" : "failed"}};
  if (!rec.ok) {
    j["error"] = rec.error;
    return j;
  }
  j["alg_welfare"] = rational_to_json(rec.alg_welfare);
  j["opt"] = rec.opt ? rational_to_json(*rec.opt) : Json(nullptr);
  j["opt_kind"] = rec.opt_kind;
  j["ratio"] = rec.ratio ? double_json(*rec.ratio) : Json(nullptr);
  j["rounds"] = rec.rounds;
  j["total_bits"] = rec.total_bits;
  j["max_player_bits"] = rec.max_player_bits;
  j["bit_check"] = rec.bit_check;
  j["greedy"] = rec.greedy;
  if (rec.transcript) j["transcript"] = *rec.transcript;
  return j;
}

Json aggregate_json(const ExperimentReport& report) {
  return Json{{"algorithm", report.algorithm},
              {"seeds", report.records.size()},
              {"failed", report.failed},
              {"alg_welfare", stat_json(report.alg_welfare)},
              {"opt", stat_json(report.opt)},
              {"ratio", stat_json(report.ratio)},
              {"rounds", stat_json(report.rounds)},
              {"total_bits", stat_json(report.total_bits)},
              {"max_player_bits", stat_json(report.max_player_bits)}};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

AlgoSpec algo_from_json(const Json& a) {
  static const std::set<std::string> fields{"name", "delta", "k", "l", "lprime", "t", "mode", "cap", "max_rounds"};
  for (const auto& [k, v] : a.items()) {
    if (!fields.contains(k)) throw ConfigError("unknown algorithm field '" + k + "'");
  }
  AlgoSpec spec;
  spec.name = a.at("name").get<std::string>();
  if (a.contains("delta")) spec.delta = rational_from_json(a.at("delta"));
  if (a.contains("k")) spec.k = a.at("k").get<std::uint32_t>();
  if (a.contains("l")) spec.bits = a.at("l").get<std::uint64_t>();
  if (a.contains("lprime")) spec.lprime = a.at("lprime").get<std::uint64_t>();
  if (a.contains("t")) spec.t = a.at("t").get<std::uint32_t>();
  if (a.contains("mode")) spec.mode = parse_proxy_mode(a.at("mode").get<std::string>());
  if (a.contains("cap")) spec.cap = a.at("cap").get<std::size_t>();
  if (a.contains("max_rounds")) spec.max_rounds = a.at("max_rounds").get<std::uint64_t>();
  return spec;
}

}  // namespace

AlgoSpec parse_algo_spec(const std::string& text) {
  const auto colon = text.find(':');
  Json doc{{"name", text.substr(0, colon)}};
  if (colon != std::string::npos) {
    std::stringstream in(text.substr(colon + 1));
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("algorithm option '" + item + "' is not key=value");
      const auto key = item.substr(0, eq);
      const auto value = item.substr(eq + 1);
      if (key == "delta" || key == "mode") {
        doc[key] = value;
        continue;
      }
      std::uint64_t parsed = 0;
      auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
      if (ec != std::errc() || end != value.data() + value.size()) {
        throw ConfigError("algorithm option '" + key + "' needs a nonnegative integer");
      }
      doc[key] = parsed;
    }
  }
  try {
    return algo_from_json(doc);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("bad algorithm spec '") + text + "': " + e.what());
  }
}

std::string AlgoSpec::label() const {
  std::ostringstream out;
  out << name;
  if (name == "auction") {
    out << "(delta=" << to_string(delta);
    if (max_rounds) out << ",max_rounds=" << *max_rounds;
    out << ')';
  } else if (name == "k-round" || name == "pipeline-k-round") {
    out << "(k=" << k << ')';
  } else if (name == "simul-det") {
    if (bits) {
      out << "(l=" << *bits << ')';
    } else if (lprime) {
      out << "(lprime=" << *lprime << ')';
    }
  } else if (name == "ca-simul") {
    out << "(t=" << t << ",mode=" << to_string(mode) << ')';
  } else if (name == "ca-k-round") {
    out << "(t=" << t << ",k=" << k << ')';
  } else if (name == "pipeline-simul") {
    out << "(mode=" << to_string(mode) << ')';
  }
  return out.str();
}

OptPolicy parse_opt_policy(std::string_view text) {
  if (text == "auto") return OptPolicy::Auto;
  if (text == "exact") return OptPolicy::Exact;
  if (text == "planted") return OptPolicy::Planted;
  if (text == "none") return OptPolicy::None;
  throw ConfigError("opt must be auto, exact, planted or none");
}

const char* to_string(OptPolicy policy) {
  switch (policy) {
    case OptPolicy::Auto: return "auto";
    case OptPolicy::Exact: return "exact";
    case OptPolicy::Planted: return "planted";
    case OptPolicy::None: return "none";
  }
  return "?";
}

Json generate_json(const DistributionSpec& spec, std::uint64_t seed) {
  if (spec.name == "hidden-item" || spec.name == "set-seek") {
    const bool hidden = spec.name == "hidden-item";
    const std::vector<std::string> names = hidden ? std::vector<std::string>{"n", "k"}
                                                  : std::vector<std::string>{"k", "t_sets"};
    for (const auto& [k, v] : spec.params) {
      if (std::find(names.begin(), names.end(), k) == names.end()) {
        throw ConfigError("distribution '" + spec.name + "' has no parameter '" + k + "'");
      }
    }
    std::vector<std::uint32_t> values;
    for (const auto& key : names) {
      auto it = spec.params.find(key);
      if (it == spec.params.end()) throw ConfigError("distribution '" + spec.name + "' needs parameter '" + key + "'");
      if (it->second < 0 || it->second > std::numeric_limits<std::uint32_t>::max()) {
        throw ConfigError("parameter '" + key + "' out of range");
      }
      values.push_back(static_cast<std::uint32_t>(it->second));
    }
    if (hidden) return to_json(gen_hidden_item(values[0], values[1], seed));
    return to_json(gen_set_seeking(values[0], values[1], seed));
  }
  return std::visit([](const auto& c) { return to_json(c); }, generate(spec, seed));
}

DistributionSpec parse_distribution(const std::string& name, const std::string& params) {
  DistributionSpec spec{name, {}};
  std::stringstream in(params);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("parameter '" + item + "' is not key=value");
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    std::int64_t parsed = 0;
    auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
    if (ec != std::errc() || end != value.data() + value.size()) {
      throw ConfigError("parameter '" + key + "' needs an integer value");
    }
    spec.params[key] = parsed;
  }
  return spec;
}

void ExperimentConfig::validate() const {
  const auto& info = find_distribution(distribution.name);
  resolve(distribution);
  if (algorithms.empty()) throw ConfigError("no algorithm given");
  for (const auto& a : algorithms) validate_algo(a, info.kind);
  if (seed_count == 0) throw ConfigError("seed count must be positive");
  if (first_seed > std::numeric_limits<std::uint64_t>::max() - (seed_count - 1)) {
    throw ConfigError("seed range overflows");
  }
  if (exact_item_limit > kMaxOracleItems) {
    throw ConfigError("exact_item_limit cannot exceed " + std::to_string(kMaxOracleItems));
  }
  // Generator parameter errors surface here rather than once per seed.
  generate(distribution, first_seed);
}

ExperimentConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"distribution", "algorithm", "algorithms", "seeds", "threads",
                                           "opt", "exact_item_limit", "keep_transcripts", "output"};
  for (const auto& [k, v] : doc.items()) {
    if (!known.contains(k)) throw ConfigError("unknown config field '" + k + "'");
  }
  ExperimentConfig config;
  try {
    const auto& dist = doc.at("distribution");
    config.distribution.name = dist.at("name").get<std::string>();
    if (dist.contains("params")) {
      for (const auto& [k, v] : dist.at("params").items()) config.distribution.params[k] = v.get<std::int64_t>();
    }
    auto parse_algo = [](const Json& a) {
      if (a.is_string()) return parse_algo_spec(a.get<std::string>());
      return algo_from_json(a);
    };
    if (doc.contains("algorithm")) config.algorithms.push_back(parse_algo(doc.at("algorithm")));
    if (doc.contains("algorithms")) {
      for (const auto& a : doc.at("algorithms")) config.algorithms.push_back(parse_algo(a));
    }
    if (doc.contains("seeds")) {
      const auto& s = doc.at("seeds");
      config.first_seed = s.value("first", std::uint64_t{0});
      config.seed_count = s.value("count", std::uint64_t{1});
    }
    config.threads = doc.value("threads", 1U);
    if (doc.contains("opt")) config.opt = parse_opt_policy(doc.at("opt").get<std::string>());
    config.exact_item_limit = doc.value("exact_item_limit", config.exact_item_limit);
    config.keep_transcripts = doc.value("keep_transcripts", false);
    if (doc.contains("output")) {
      const auto& o = doc.at("output");
      if (o.contains("csv")) config.csv_path = o.at("csv").get<std::string>();
      if (o.contains("json")) config.json_path = o.at("json").get<std::string>();
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return config;
}

Json to_json(const ExperimentConfig& config) {
  Json algos = Json::array();
  for (const auto& a : config.algorithms) algos.push_back(a.label());
  return Json{{"distribution", {{"name", config.distribution.name}, {"params", resolve(config.distribution)}}},
              {"algorithms", std::move(algos)},
              {"seeds", {{"first", config.first_seed}, {"count", config.seed_count}}},
              {"opt", to_string(config.opt)},
              {"exact_item_limit", config.exact_item_limit},
              {"keep_transcripts", config.keep_transcripts}};
}

Stat summarize(std::span<const double> values) {
  Stat s;
  s.count = values.size();
  if (values.empty()) return s;
  s.min = values.front();
  s.max = values.front();
  double sum = 0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double sq = 0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.count - 1));
    s.stderr_ = s.stddev / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

SeedRecord run_seed(const ExperimentConfig& config, const AlgoSpec& algo, std::uint64_t seed) {
  SeedRecord rec;
  rec.seed = seed;
  try {
    const auto instance = generate(config.distribution, seed);
    if (const auto* m = std::get_if<MatchingCase>(&instance)) {
      run_matching(rec, config, algo, *m, seed);
    } else if (const auto* b = std::get_if<BinaryXosCase>(&instance)) {
      run_binary(rec, config, algo, *b);
    } else {
      run_xos(rec, config, algo, std::get<XosCase>(instance));
    }
    if (rec.opt) rec.ratio = ratio_of(*rec.opt, rec.alg_welfare);
    if (!rec.bit_check) throw std::logic_error("transcript bit totals do not recompute");
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

ExperimentReport run_batch(const ExperimentConfig& config) {
  config.validate();
  auto report = run_one(config, config.algorithms.front());
  if (config.csv_path) write_text(*config.csv_path, to_csv(report));
  if (config.json_path) write_text(*config.json_path, to_json(report, config).dump(2) + "\n");
  return report;
}

CompareReport compare_algos(const ExperimentConfig& config) {
  config.validate();
  if (config.algorithms.size() < 2) throw ConfigError("compare needs at least two algorithms");
  CompareReport out;
  for (const auto& algo : config.algorithms) out.reports.push_back(run_one(config, algo));

  const auto& base = out.reports.front();
  for (std::size_t a = 1; a < out.reports.size(); ++a) {
    const auto& other = out.reports[a];
    std::vector<double> dw, dr;
    for (std::size_t s = 0; s < base.records.size(); ++s) {
      const auto& x = base.records[s];
      const auto& y = other.records[s];
      if (!x.ok || !y.ok) continue;
      dw.push_back(to_double(y.alg_welfare - x.alg_welfare));
      if (x.ratio && y.ratio) dr.push_back(*y.ratio - *x.ratio);
    }
    out.deltas.push_back(PairedDelta{base.algorithm, other.algorithm, summarize(dw), summarize(dr)});
  }
  if (config.csv_path) write_text(*config.csv_path, to_csv(out));
  if (config.json_path) write_text(*config.json_path, to_json(out, config).dump(2) + "\n");
  return out;
}

std::string to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "schema,algorithm,seed,status,alg_welfare,opt,opt_kind,ratio,rounds,total_bits,max_player_bits,bit_check,"
         "greedy,error\n";
  for (const auto& rec : report.records) {
    out << kCsvSchema << ',' << csv_field(report.algorithm) << ',' << rec.seed << ',' << (rec.ok ? "ok" : "failed")
        << ',';
    if (rec.ok) {
      out << to_string(rec.alg_welfare) << ',' << (rec.opt ? to_string(*rec.opt) : "") << ',' << rec.opt_kind << ','
          << (rec.ratio ? format_double(*rec.ratio) : "") << ',' << rec.rounds << ',' << rec.total_bits << ','
          << rec.max_player_bits << ',' << (rec.bit_check ? 1 : 0) << ',' << (rec.greedy ? 1 : 0) << ",\n";
    } else {
      out << ",,,,,,,,," << csv_field(rec.error) << '\n';
    }
  }
  return out.str();
}

std::string to_csv(const CompareReport& report) {
  std::ostringstream out;
  out << "schema,seed";
  for (std::size_t a = 0; a < report.reports.size(); ++a) {
    out << ",welfare_" << a << ",ratio_" << a << ",status_" << a;
  }
  out << '\n';
  const auto seeds = report.reports.empty() ? 0 : report.reports.front().records.size();
  for (std::size_t s = 0; s < seeds; ++s) {
    out << kCsvSchema << ',' << report.reports.front().records[s].seed;
    for (const auto& r : report.reports) {
      const auto& rec = r.records[s];
      out << ',' << (rec.ok ? to_string(rec.alg_welfare) : "") << ','
          << (rec.ok && rec.ratio ? format_double(*rec.ratio) : "") << ',' << (rec.ok ? "ok" : "failed");
    }
    out << '\n';
  }
  return out.str();
}

Json to_json(const ExperimentReport& report, const ExperimentConfig& config) {
  Json records = Json::array();
  for (const auto& rec : report.records) records.push_back(record_json(rec));
  return Json{{"schema", kCsvSchema},
              {"config", to_json(config)},
              {"aggregate", aggregate_json(report)},
              {"records", std::move(records)}};
}

Json to_json(const CompareReport& report, const ExperimentConfig& config) {
  Json reports = Json::array();
  for (const auto& r : report.reports) reports.push_back(to_json(r, config));
  Json deltas = Json::array();
  for (const auto& d : report.deltas) {
    deltas.push_back(Json{{"baseline", d.baseline},
                          {"other", d.other},
                          {"welfare_delta", stat_json(d.welfare_delta)},
                          {"ratio_delta", stat_json(d.ratio_delta)}});
  }
  return Json{{"schema", kCsvSchema},
              {"config", to_json(config)},
              {"labels", [&] {
                 Json l = Json::array();
                 for (const auto& r : report.reports) l.push_back(r.algorithm);
                 return l;
               }()},
              {"paired", std::move(deltas)},
              {"reports", std::move(reports)}};
}

}  // namespace market_rounds
