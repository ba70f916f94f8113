#include "market_rounds/json_io.hpp"

#include <fstream>
#include <sstream>

namespace market_rounds {
namespace {

ItemSet items_from_json(const Json& arr, const char* what) {
  if (!arr.is_array()) throw ConfigError(std::string(what) + " must be an array of item indices");
  std::vector<ItemId> items;
  for (const auto& x : arr) {
    if (!x.is_number_integer() || x.get<std::int64_t>() < 0) {
      throw ConfigError(std::string(what) + " must hold nonnegative integers");
    }
    items.push_back(x.get<ItemId>());
  }
  return make_item_set(std::move(items));
}

std::uint32_t count_field(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number_integer() || doc.at(key).get<std::int64_t>() < 0) {
    throw ConfigError(std::string("missing or invalid field '") + key + "'");
  }
  return doc.at(key).get<std::uint32_t>();
}

const Json& array_field(const Json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array()) {
    throw ConfigError(std::string("missing or invalid array '") + key + "'");
  }
  return doc.at(key);
}

void check_range(std::span<const ItemId> items, std::uint32_t m) {
  for (auto j : items) {
    if (j >= m) throw DomainError("item " + std::to_string(j) + " outside universe of size " + std::to_string(m));
  }
}

}  // namespace

Json rational_to_json(const Rational& value) {
  if (value.denominator() == 1) return value.numerator();
  return to_string(value);
}

Rational rational_from_json(const Json& value) {
  if (value.is_number_integer()) return Rational(value.get<std::int64_t>());
  if (value.is_number_float()) return rational_from_double(value.get<double>());
  if (value.is_string()) {
    try {
      return parse_rational(value.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("expected a number or a \"p/q\" string, got " + value.dump());
}

const char* to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::Matching: return "matching";
    case InstanceKind::Xos: return "xos";
    case InstanceKind::BinaryXos: return "binary-xos";
  }
  return "?";
}

std::vector<XOSValuation> InstanceDoc::as_xos() const {
  switch (kind) {
    case InstanceKind::Xos: return xos;
    case InstanceKind::BinaryXos: {
      std::vector<XOSValuation> out;
      for (const auto& v : binary) out.push_back(v.to_xos());
      return out;
    }
    case InstanceKind::Matching: break;
  }
  throw ConfigError("a matching instance has no XOS valuations");
}

Json to_json(const MatchingInstance& inst) {
  return Json{{"kind", "matching"}, {"n", inst.n()}, {"neighbors", inst.all_neighbors()}};
}

Json to_json(std::span<const XOSValuation> players) {
  Json list = Json::array();
  for (const auto& v : players) {
    Json clauses = Json::array();
    for (const auto& clause : v.clauses()) {
      Json c = Json::object();
      for (const auto& [item, value] : clause.entries()) c[std::to_string(item)] = rational_to_json(value);
      clauses.push_back(std::move(c));
    }
    list.push_back(Json{{"clauses", std::move(clauses)}});
  }
  const std::uint32_t m = players.empty() ? 0 : players.front().m();
  return Json{{"kind", "xos"}, {"m", m}, {"players", std::move(list)}};
}

Json to_json(std::span<const BinaryXOSValuation> players) {
  Json list = Json::array();
  for (const auto& v : players) {
    list.push_back(Json{{"mu", rational_to_json(v.mu())}, {"clause_sets", v.clause_sets()}});
  }
  const std::uint32_t m = players.empty() ? 0 : players.front().m();
  return Json{{"kind", "binary-xos"}, {"m", m}, {"players", std::move(list)}};
}

Json to_json(const Allocation& alloc) { return Json(alloc.bundles); }

Json to_json(const PlantedMeta& meta) {
  Json sets = Json::object();
  for (const auto& [k, v] : meta.sets) sets[k] = v;
  Json lists = Json::object();
  for (const auto& [k, v] : meta.set_lists) lists[k] = v;
  Json scalars = Json::object();
  for (const auto& [k, v] : meta.scalars) scalars[k] = v;
  return Json{{"planted", to_json(meta.planted)},
              {"planted_welfare", rational_to_json(meta.planted_welfare)},
              {"sets", std::move(sets)},
              {"set_lists", std::move(lists)},
              {"scalars", std::move(scalars)}};
}

Json to_json(const Matching& matching) {
  Json pairs = Json::array();
  for (std::size_t i = 0; i < matching.item_of.size(); ++i) {
    if (matching.item_of[i]) pairs.push_back(Json::array({i, *matching.item_of[i]}));
  }
  return Json{{"size", matching.size()}, {"pairs", std::move(pairs)}};
}

Json to_json(const HallCertificate& cert) { return Json{{"high_price_items", cert.high_price_items}}; }

Json to_json(const HiddenItemCase& c) {
  return Json{{"kind", "hidden-item"}, {"n", c.n}, {"k", c.k}, {"alice", c.alice}, {"bob", c.bob},
              {"meta", {{"hidden", c.hidden}}}};
}

Json to_json(const SetSeekingCase& c) {
  return Json{{"kind", "set-seek"},
              {"k", c.k},
              {"x", c.x},
              {"family", c.family},
              {"petal", c.petal},
              {"meta", {{"special", c.special}, {"special_index", c.special_index}}}};
}

Json to_json(const Transcript& transcript) {
  Json rounds = Json::array();
  for (const auto& round : transcript.rounds()) {
    Json messages = Json::array();
    for (const auto& msg : round) {
      messages.push_back(Json{{"player", msg.player}, {"kind", to_string(msg.kind)}, {"payload", msg.payload},
                              {"bits", msg.bits}});
    }
    rounds.push_back(std::move(messages));
  }
  auto out = transcript_summary(transcript);
  out["messages"] = std::move(rounds);
  return out;
}

Json transcript_summary(const Transcript& transcript) {
  return Json{{"rounds", transcript.total_rounds()},
              {"bits_per_round", transcript.bits_per_round()},
              {"total_bits", transcript.total_bits()},
              {"max_player_bits", transcript.max_player_bits()},
              {"universe", transcript.universe()}};
}

Json to_json(const MatchingCase& c) {
  auto doc = to_json(c.instance);
  doc["meta"] = to_json(c.meta);
  return doc;
}

Json to_json(const BinaryXosCase& c) {
  auto doc = to_json(std::span<const BinaryXOSValuation>(c.players));
  doc["meta"] = to_json(c.meta);
  return doc;
}

Json to_json(const XosCase& c) {
  auto doc = to_json(std::span<const XOSValuation>(c.players));
  doc["meta"] = to_json(c.meta);
  return doc;
}

Allocation allocation_from_json(const Json& doc) {
  if (!doc.is_array()) throw ConfigError("allocation must be an array of bundles");
  Allocation alloc;
  for (const auto& b : doc) alloc.bundles.push_back(items_from_json(b, "bundle"));
  return alloc;
}

PlantedMeta meta_from_json(const Json& doc) {
  if (!doc.is_object()) throw ConfigError("meta must be an object");
  PlantedMeta meta;
  if (doc.contains("planted")) meta.planted = allocation_from_json(doc.at("planted"));
  if (doc.contains("planted_welfare")) meta.planted_welfare = rational_from_json(doc.at("planted_welfare"));
  if (doc.contains("sets")) {
    for (const auto& [k, v] : doc.at("sets").items()) meta.sets[k] = items_from_json(v, "meta set");
  }
  if (doc.contains("set_lists")) {
    for (const auto& [k, v] : doc.at("set_lists").items()) {
      if (!v.is_array()) throw ConfigError("meta set list must be an array");
      auto& list = meta.set_lists[k];
      for (const auto& s : v) list.push_back(items_from_json(s, "meta set"));
    }
  }
  if (doc.contains("scalars")) {
    for (const auto& [k, v] : doc.at("scalars").items()) meta.scalars[k] = v.get<std::int64_t>();
  }
  return meta;
}

InstanceDoc instance_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string()) {
    throw ConfigError("instance must be an object with a string 'kind'");
  }
  const auto kind = doc.at("kind").get<std::string>();
  InstanceDoc out;
  if (kind == "matching") {
    out.kind = InstanceKind::Matching;
    const auto n = count_field(doc, "n");
    const auto& rows = array_field(doc, "neighbors");
    std::vector<ItemSet> neighbors;
    for (const auto& row : rows) neighbors.push_back(items_from_json(row, "neighbor set"));
    if (neighbors.size() != n) throw ConfigError("'neighbors' must have exactly n entries");
    try {
      out.matching = MatchingInstance(n, std::move(neighbors));
    } catch (const std::out_of_range& e) {
      throw DomainError(e.what());
    }
  } else if (kind == "xos") {
    out.kind = InstanceKind::Xos;
    const auto m = count_field(doc, "m");
    for (const auto& p : array_field(doc, "players")) {
      std::vector<AdditiveClause> clauses;
      for (const auto& c : array_field(p, "clauses")) {
        if (!c.is_object()) throw ConfigError("a clause must be an object mapping item to value");
        std::map<ItemId, Rational> values;
        for (const auto& [key, value] : c.items()) {
          std::size_t used = 0;
          unsigned long item = 0;
          try {
            item = std::stoul(key, &used);
          } catch (const std::exception&) {
            used = 0;
          }
          if (used != key.size() || key.empty()) throw ConfigError("clause key '" + key + "' is not an item index");
          if (item >= m) throw DomainError("item " + key + " outside universe of size " + std::to_string(m));
          values[static_cast<ItemId>(item)] = rational_from_json(value);
        }
        try {
          clauses.emplace_back(values);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      out.xos.emplace_back(m, std::move(clauses));
    }
  } else if (kind == "binary-xos") {
    out.kind = InstanceKind::BinaryXos;
    const auto m = count_field(doc, "m");
    for (const auto& p : array_field(doc, "players")) {
      if (!p.contains("mu")) throw ConfigError("binary-xos player needs 'mu'");
      const auto mu = rational_from_json(p.at("mu"));
      if (mu <= 0) throw ConfigError("mu must be positive");
      std::vector<ItemSet> sets;
      for (const auto& s : array_field(p, "clause_sets")) {
        sets.push_back(items_from_json(s, "clause set"));
        check_range(sets.back(), m);
      }
      out.binary.emplace_back(m, mu, std::move(sets));
    }
  } else {
    throw ConfigError("unsupported instance kind '" + kind + "'");
  }
  if (doc.contains("meta") && doc.at("meta").contains("planted")) out.meta = meta_from_json(doc.at("meta"));
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

InstanceDoc read_instance(const std::filesystem::path& path) { return instance_from_json(read_json_file(path)); }

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace market_rounds
