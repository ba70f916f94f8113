#pragma once

#include <optional>
#include <vector>

#include "market_rounds/core.hpp"

namespace market_rounds {

/// item_of[i] is the item matched to player i, if any.
struct Matching {
  std::vector<std::optional<ItemId>> item_of;

  Matching() = default;
  explicit Matching(std::size_t n) : item_of(n) {}

  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] std::vector<std::optional<PlayerId>> owners(std::uint32_t items) const;
  [[nodiscard]] Allocation to_allocation() const;

  friend bool operator==(const Matching&, const Matching&) = default;
};

/// Items are distinct and every player holds only a neighbor.
bool is_valid_matching(const MatchingInstance& inst, const Matching& matching);

/// Maximum-cardinality matching by layered augmenting paths (Hopcroft-Karp).
Matching max_matching(const MatchingInstance& inst);

/// Items priced "high" in a Hall-style optimality witness.
struct HallCertificate {
  ItemSet high_price_items;

  friend bool operator==(const HallCertificate&, const HallCertificate&) = default;
};

/// Checks: (1) every high-price item is allocated; (2) every player not holding a low-price
/// item is interested only in high-price items. A matching passing both is maximum.
bool verify_certificate(const MatchingInstance& inst, const Matching& matching, const HallCertificate& cert);

/// Builds the witness from the alternating-path layering rooted at the free players.
/// Returns nullopt when an augmenting path exists (the matching is not maximum).
std::optional<HallCertificate> emit_certificate(const MatchingInstance& inst, const Matching& matching);

}  // namespace market_rounds
