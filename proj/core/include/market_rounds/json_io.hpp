#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "market_rounds/core.hpp"
#include "market_rounds/instance_gen.hpp"
#include "market_rounds/matching_oracle.hpp"
#include "market_rounds/transcript.hpp"

namespace market_rounds {

using Json = nlohmann::json;

/// Integers as JSON numbers, everything else as a "p/q" string.
Json rational_to_json(const Rational& value);
/// Accepts integers, decimals and "p/q" strings.
Rational rational_from_json(const Json& value);

enum class InstanceKind { Matching, Xos, BinaryXos };
const char* to_string(InstanceKind kind);

/// A parsed instance file. Exactly one of the three payloads is populated, according to `kind`.
struct InstanceDoc {
  InstanceKind kind = InstanceKind::Matching;
  MatchingInstance matching;
  std::vector<XOSValuation> xos;
  std::vector<BinaryXOSValuation> binary;
  std::optional<PlantedMeta> meta;

  /// Binary players are widened to general XOS; matching instances are rejected.
  [[nodiscard]] std::vector<XOSValuation> as_xos() const;
};

Json to_json(const MatchingInstance& inst);
Json to_json(std::span<const XOSValuation> players);
Json to_json(std::span<const BinaryXOSValuation> players);
Json to_json(const PlantedMeta& meta);
Json to_json(const Allocation& alloc);
Json to_json(const Matching& matching);
Json to_json(const HallCertificate& cert);
Json to_json(const HiddenItemCase& c);
Json to_json(const SetSeekingCase& c);
/// Message log with per-round bit totals.
Json to_json(const Transcript& transcript);
/// Summary without the message log: rounds, bits per round, total and max per-player bits.
Json transcript_summary(const Transcript& transcript);

Json to_json(const MatchingCase& c);
Json to_json(const BinaryXosCase& c);
Json to_json(const XosCase& c);

/// Throws ConfigError on schema violations and DomainError on bad indices.
InstanceDoc instance_from_json(const Json& doc);
PlantedMeta meta_from_json(const Json& doc);
Allocation allocation_from_json(const Json& doc);

Json read_json_file(const std::filesystem::path& path);
InstanceDoc read_instance(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& doc);

}  // namespace market_rounds
