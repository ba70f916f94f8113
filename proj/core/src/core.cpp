#include "market_rounds/core.hpp"

#include <algorithm>
#include <iterator>

namespace market_rounds {

ItemSet make_item_set(std::vector<ItemId> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

std::size_t intersection_size(std::span<const ItemId> a, std::span<const ItemId> b) {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

ItemSet set_intersection(std::span<const ItemId> a, std::span<const ItemId> b) {
  ItemSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

ItemSet set_difference(std::span<const ItemId> a, std::span<const ItemId> b) {
  ItemSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

ItemSet set_union(std::span<const ItemId> a, std::span<const ItemId> b) {
  ItemSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(std::span<const ItemId> sub, std::span<const ItemId> super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

bool contains(std::span<const ItemId> set, ItemId item) {
  return std::binary_search(set.begin(), set.end(), item);
}

MatchingInstance::MatchingInstance(std::uint32_t n, std::vector<ItemSet> neighbors) : n_(n) {
  if (neighbors.size() != n) {
    throw ConfigError("matching instance has " + std::to_string(neighbors.size()) +
                      " neighbor sets for n=" + std::to_string(n));
  }
  neighbors_.reserve(n);
  for (auto& s : neighbors) {
    auto set = make_item_set(std::move(s));
    if (!set.empty() && set.back() >= n) {
      throw DomainError("neighbor index " + std::to_string(set.back()) + " outside [0, " + std::to_string(n) + ")");
    }
    neighbors_.push_back(std::move(set));
  }
}

MatchingInstance MatchingInstance::identity(std::uint32_t n) {
  std::vector<ItemSet> sets(n);
  for (std::uint32_t i = 0; i < n; ++i) sets[i] = {i};
  return MatchingInstance(n, std::move(sets));
}

AdditiveClause::AdditiveClause(const std::map<ItemId, Rational>& values) {
  for (const auto& [item, value] : values) {
    if (value < 0) throw DomainError("negative clause value for item " + std::to_string(item));
    if (value > 0) entries_.emplace_back(item, value);
  }
}

Rational AdditiveClause::value_of(ItemId item) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), item,
                             [](const auto& e, ItemId j) { return e.first < j; });
  return (it != entries_.end() && it->first == item) ? it->second : Rational(0);
}

Rational AdditiveClause::value_on(std::span<const ItemId> bundle) const {
  Rational sum(0);
  auto it = entries_.begin();
  for (ItemId j : bundle) {
    while (it != entries_.end() && it->first < j) ++it;
    if (it == entries_.end()) break;
    if (it->first == j) sum += it->second;
  }
  return sum;
}

XOSValuation::XOSValuation(std::uint32_t m, std::vector<AdditiveClause> clauses)
    : m_(m), clauses_(std::move(clauses)) {
  if (clauses_.empty()) clauses_.emplace_back();
  for (const auto& c : clauses_) {
    if (!c.empty() && c.entries().back().first >= m_) {
      throw DomainError("clause item " + std::to_string(c.entries().back().first) + " outside universe of " +
                        std::to_string(m_));
    }
  }
}

BinaryXOSValuation::BinaryXOSValuation(std::uint32_t m, Rational mu, std::vector<ItemSet> clause_sets)
    : m_(m), mu_(mu) {
  if (mu_ <= 0) throw ConfigError("binary XOS level mu must be positive");
  clause_sets_.reserve(clause_sets.size());
  for (auto& s : clause_sets) {
    auto set = make_item_set(std::move(s));
    if (!set.empty() && set.back() >= m_) {
      throw DomainError("clause item " + std::to_string(set.back()) + " outside universe of " + std::to_string(m_));
    }
    clause_sets_.push_back(std::move(set));
  }
}

std::size_t BinaryXOSValuation::units(std::span<const ItemId> bundle) const {
  std::size_t best = 0;
  for (const auto& t : clause_sets_) best = std::max(best, intersection_size(t, bundle));
  return best;
}

Rational BinaryXOSValuation::value(std::span<const ItemId> bundle) const {
  return mu_ * static_cast<std::int64_t>(units(bundle));
}

XOSValuation BinaryXOSValuation::to_xos() const {
  std::vector<AdditiveClause> clauses;
  clauses.reserve(clause_sets_.size());
  for (const auto& t : clause_sets_) {
    std::map<ItemId, Rational> values;
    for (ItemId j : t) values[j] = mu_;
    clauses.emplace_back(values);
  }
  return XOSValuation(m_, std::move(clauses));
}

std::size_t Allocation::items_allocated() const {
  std::size_t total = 0;
  for (const auto& b : bundles) total += b.size();
  return total;
}

PriceVector::PriceVector(std::uint32_t m, std::uint32_t q) : q_(q), ticks_(m, 0) {
  if (q_ == 0) throw ConfigError("price increment must be 1/q with q >= 1");
}

std::uint64_t PriceVector::total_ticks() const {
  std::uint64_t total = 0;
  for (auto t : ticks_) total += t;
  return total;
}

void PriceVector::raise(ItemId j) {
  if (ticks_.at(j) >= q_) throw DomainError("price of item " + std::to_string(j) + " already at 1");
  ++ticks_[j];
}

void PriceVector::set_ticks(ItemId j, std::uint32_t ticks) {
  if (ticks > q_) throw DomainError("price above 1");
  ticks_.at(j) = ticks;
}

XosEvaluation evaluate_xos(const XOSValuation& v, std::span<const ItemId> bundle) {
  for (ItemId j : bundle) {
    if (j >= v.m()) throw DomainError("item " + std::to_string(j) + " outside universe of " + std::to_string(v.m()));
  }
  XosEvaluation best{Rational(0), 0};
  for (std::size_t r = 0; r < v.clauses().size(); ++r) {
    auto value = v.clauses()[r].value_on(bundle);
    if (value > best.value) best = {value, r};
  }
  return best;
}

bool check_feasible(const Allocation& alloc, std::uint32_t m) {
  std::vector<bool> used(m, false);
  for (const auto& bundle : alloc.bundles) {
    for (ItemId j : bundle) {
      if (j >= m || used[j]) return false;
      used[j] = true;
    }
  }
  return true;
}

namespace {

template <typename Valuation>
void validate_for_welfare(const Allocation& alloc, std::span<const Valuation> valuations) {
  if (alloc.bundles.size() > valuations.size()) {
    throw ConfigError("allocation has more bundles than there are valuations");
  }
  if (valuations.empty()) return;
  const auto m = valuations.front().m();
  std::vector<bool> used(m, false);
  for (const auto& bundle : alloc.bundles) {
    for (ItemId j : bundle) {
      if (j >= m) throw DomainError("allocated item " + std::to_string(j) + " outside universe");
      if (used[j]) throw InfeasibleError("item " + std::to_string(j) + " allocated twice");
      used[j] = true;
    }
  }
}

}  // namespace

Rational welfare(const Allocation& alloc, std::span<const XOSValuation> valuations) {
  validate_for_welfare(alloc, valuations);
  Rational total(0);
  for (std::size_t i = 0; i < alloc.bundles.size(); ++i) {
    total += evaluate_xos(valuations[i], alloc.bundles[i]).value;
  }
  return total;
}

Rational welfare(const Allocation& alloc, std::span<const BinaryXOSValuation> valuations) {
  validate_for_welfare(alloc, valuations);
  Rational total(0);
  for (std::size_t i = 0; i < alloc.bundles.size(); ++i) total += valuations[i].value(alloc.bundles[i]);
  return total;
}

}  // namespace market_rounds
