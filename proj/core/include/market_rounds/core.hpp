#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "market_rounds/rational.hpp"

namespace market_rounds {

using ItemId = std::uint32_t;
using PlayerId = std::uint32_t;

/// Sorted, duplicate-free list of item indices.
using ItemSet = std::vector<ItemId>;

// Error taxonomy shared by every module.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct DomainError : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct InfeasibleError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Sorts and deduplicates in place, returning the canonical set.
ItemSet make_item_set(std::vector<ItemId> items);
std::size_t intersection_size(std::span<const ItemId> a, std::span<const ItemId> b);
ItemSet set_intersection(std::span<const ItemId> a, std::span<const ItemId> b);
ItemSet set_difference(std::span<const ItemId> a, std::span<const ItemId> b);
ItemSet set_union(std::span<const ItemId> a, std::span<const ItemId> b);
bool is_subset(std::span<const ItemId> sub, std::span<const ItemId> super);
bool contains(std::span<const ItemId> set, ItemId item);

/// Bipartite demand structure: player i is adjacent to the items in neighbors[i].
class MatchingInstance {
 public:
  MatchingInstance() = default;
  MatchingInstance(std::uint32_t n, std::vector<ItemSet> neighbors);

  [[nodiscard]] std::uint32_t n() const { return n_; }
  [[nodiscard]] const ItemSet& neighbors(PlayerId i) const { return neighbors_.at(i); }
  [[nodiscard]] const std::vector<ItemSet>& all_neighbors() const { return neighbors_; }

  static MatchingInstance identity(std::uint32_t n);

  friend bool operator==(const MatchingInstance&, const MatchingInstance&) = default;

 private:
  std::uint32_t n_ = 0;
  std::vector<ItemSet> neighbors_;
};

/// One additive component of an XOS valuation. Only strictly positive values are stored.
class AdditiveClause {
 public:
  AdditiveClause() = default;
  explicit AdditiveClause(const std::map<ItemId, Rational>& values);

  [[nodiscard]] Rational value_of(ItemId item) const;
  [[nodiscard]] Rational value_on(std::span<const ItemId> bundle) const;
  [[nodiscard]] const std::vector<std::pair<ItemId, Rational>>& entries() const { return entries_; }
  [[nodiscard]] bool empty() const { return entries_.empty(); }

  friend bool operator==(const AdditiveClause&, const AdditiveClause&) = default;

 private:
  std::vector<std::pair<ItemId, Rational>> entries_;  // sorted by item
};

struct XosEvaluation {
  Rational value;
  std::size_t clause = 0;  // lowest-index maximizing clause
};

/// v(S) = max over clauses of the clause's sum on S.
class XOSValuation {
 public:
  XOSValuation() = default;
  XOSValuation(std::uint32_t m, std::vector<AdditiveClause> clauses);

  [[nodiscard]] std::uint32_t m() const { return m_; }
  [[nodiscard]] const std::vector<AdditiveClause>& clauses() const { return clauses_; }

  friend bool operator==(const XOSValuation&, const XOSValuation&) = default;

 private:
  std::uint32_t m_ = 0;
  std::vector<AdditiveClause> clauses_;
};

/// XOS valuation whose clauses give either mu or 0 per item; each clause is stored as its support.
class BinaryXOSValuation {
 public:
  BinaryXOSValuation() = default;
  BinaryXOSValuation(std::uint32_t m, Rational mu, std::vector<ItemSet> clause_sets);

  [[nodiscard]] std::uint32_t m() const { return m_; }
  [[nodiscard]] const Rational& mu() const { return mu_; }
  [[nodiscard]] const std::vector<ItemSet>& clause_sets() const { return clause_sets_; }

  /// max over clauses of |T ∩ S|, i.e. the value in units of mu.
  [[nodiscard]] std::size_t units(std::span<const ItemId> bundle) const;
  [[nodiscard]] Rational value(std::span<const ItemId> bundle) const;
  [[nodiscard]] XOSValuation to_xos() const;

  friend bool operator==(const BinaryXOSValuation&, const BinaryXOSValuation&) = default;

 private:
  std::uint32_t m_ = 0;
  Rational mu_{1};
  std::vector<ItemSet> clause_sets_;
};

/// bundles[i] is the item set given to player i.
struct Allocation {
  std::vector<ItemSet> bundles;

  Allocation() = default;
  explicit Allocation(std::size_t n) : bundles(n) {}
  explicit Allocation(std::vector<ItemSet> b) : bundles(std::move(b)) {}

  [[nodiscard]] std::size_t players() const { return bundles.size(); }
  [[nodiscard]] std::size_t items_allocated() const;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

/// Prices are stored as integer tick counts of delta = 1/q, so a price of 1 is exactly q ticks.
class PriceVector {
 public:
  PriceVector(std::uint32_t m, std::uint32_t q);

  [[nodiscard]] std::uint32_t q() const { return q_; }
  [[nodiscard]] Rational delta() const { return Rational(1, q_); }
  [[nodiscard]] std::uint32_t ticks(ItemId j) const { return ticks_.at(j); }
  [[nodiscard]] Rational price(ItemId j) const { return Rational(ticks_.at(j), q_); }
  [[nodiscard]] bool below_one(ItemId j) const { return ticks_.at(j) < q_; }
  [[nodiscard]] std::size_t size() const { return ticks_.size(); }
  [[nodiscard]] std::uint64_t total_ticks() const;

  /// Raises the price by delta. Throws DomainError when the price is already 1.
  void raise(ItemId j);
  void set_ticks(ItemId j, std::uint32_t ticks);

  friend bool operator==(const PriceVector&, const PriceVector&) = default;

 private:
  std::uint32_t q_;
  std::vector<std::uint32_t> ticks_;
};

/// Max over clauses of the clause sum on `bundle`; ties resolve to the lowest clause index.
XosEvaluation evaluate_xos(const XOSValuation& v, std::span<const ItemId> bundle);

/// True iff bundles are pairwise disjoint and every index lies in [0, m).
bool check_feasible(const Allocation& alloc, std::uint32_t m);

/// Sum of v_i(A_i). Throws InfeasibleError on overlapping bundles, DomainError on bad indices.
Rational welfare(const Allocation& alloc, std::span<const XOSValuation> valuations);
Rational welfare(const Allocation& alloc, std::span<const BinaryXOSValuation> valuations);

}  // namespace market_rounds
