#include "market_rounds/matching_oracle.hpp"

#include <deque>
#include <limits>

namespace market_rounds {

std::size_t Matching::size() const {
  std::size_t count = 0;
  for (const auto& item : item_of) count += item.has_value();
  return count;
}

std::vector<std::optional<PlayerId>> Matching::owners(std::uint32_t items) const {
  std::vector<std::optional<PlayerId>> owner(items);
  for (PlayerId i = 0; i < item_of.size(); ++i) {
    if (item_of[i]) owner.at(*item_of[i]) = i;
  }
  return owner;
}

Allocation Matching::to_allocation() const {
  Allocation alloc(item_of.size());
  for (std::size_t i = 0; i < item_of.size(); ++i) {
    if (item_of[i]) alloc.bundles[i] = {*item_of[i]};
  }
  return alloc;
}

bool is_valid_matching(const MatchingInstance& inst, const Matching& matching) {
  if (matching.item_of.size() != inst.n()) return false;
  std::vector<bool> used(inst.n(), false);
  for (PlayerId i = 0; i < inst.n(); ++i) {
    const auto& item = matching.item_of[i];
    if (!item) continue;
    if (*item >= inst.n() || used[*item] || !contains(inst.neighbors(i), *item)) return false;
    used[*item] = true;
  }
  return true;
}

namespace {

constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

class HopcroftKarp {
 public:
  explicit HopcroftKarp(const MatchingInstance& inst)
      : inst_(inst), item_of_(inst.n(), kInf), owner_(inst.n(), kInf), dist_(inst.n(), kInf) {}

  Matching run() {
    while (layer()) {
      for (PlayerId i = 0; i < inst_.n(); ++i) {
        if (item_of_[i] == kInf) augment(i);
      }
    }
    Matching m(inst_.n());
    for (PlayerId i = 0; i < inst_.n(); ++i) {
      if (item_of_[i] != kInf) m.item_of[i] = item_of_[i];
    }
    return m;
  }

 private:
  // BFS from free players; returns true when some free item is reachable.
  bool layer() {
    std::deque<PlayerId> queue;
    for (PlayerId i = 0; i < inst_.n(); ++i) {
      if (item_of_[i] == kInf) {
        dist_[i] = 0;
        queue.push_back(i);
      } else {
        dist_[i] = kInf;
      }
    }
    bool found = false;
    while (!queue.empty()) {
      const auto i = queue.front();
      queue.pop_front();
      for (ItemId j : inst_.neighbors(i)) {
        const auto next = owner_[j];
        if (next == kInf) {
          found = true;
        } else if (dist_[next] == kInf) {
          dist_[next] = dist_[i] + 1;
          queue.push_back(next);
        }
      }
    }
    return found;
  }

  bool augment(PlayerId i) {
    for (ItemId j : inst_.neighbors(i)) {
      const auto next = owner_[j];
      if (next == kInf || (dist_[next] == dist_[i] + 1 && augment(next))) {
        item_of_[i] = j;
        owner_[j] = i;
        return true;
      }
    }
    dist_[i] = kInf;
    return false;
  }

  const MatchingInstance& inst_;
  std::vector<std::uint32_t> item_of_;
  std::vector<std::uint32_t> owner_;
  std::vector<std::uint32_t> dist_;
};

}  // namespace

Matching max_matching(const MatchingInstance& inst) { return HopcroftKarp(inst).run(); }

bool verify_certificate(const MatchingInstance& inst, const Matching& matching, const HallCertificate& cert) {
  if (!is_valid_matching(inst, matching)) return false;
  const auto owner = matching.owners(inst.n());
  for (ItemId j : cert.high_price_items) {
    if (j >= inst.n() || !owner[j]) return false;
  }
  for (PlayerId i = 0; i < inst.n(); ++i) {
    const auto& item = matching.item_of[i];
    const bool holds_low = item && !contains(cert.high_price_items, *item);
    if (!holds_low && !is_subset(inst.neighbors(i), cert.high_price_items)) return false;
  }
  return true;
}

std::optional<HallCertificate> emit_certificate(const MatchingInstance& inst, const Matching& matching) {
  if (!is_valid_matching(inst, matching)) return std::nullopt;
  const auto owner = matching.owners(inst.n());
  std::vector<bool> player_seen(inst.n(), false);
  std::vector<bool> item_seen(inst.n(), false);
  std::deque<PlayerId> queue;
  for (PlayerId i = 0; i < inst.n(); ++i) {
    if (!matching.item_of[i]) {
      player_seen[i] = true;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const auto i = queue.front();
    queue.pop_front();
    for (ItemId j : inst.neighbors(i)) {
      if (item_seen[j]) continue;
      item_seen[j] = true;
      if (!owner[j]) return std::nullopt;  // augmenting path
      if (!player_seen[*owner[j]]) {
        player_seen[*owner[j]] = true;
        queue.push_back(*owner[j]);
      }
    }
  }
  HallCertificate cert;
  for (ItemId j = 0; j < inst.n(); ++j) {
    if (item_seen[j]) cert.high_price_items.push_back(j);
  }
  return cert;
}

}  // namespace market_rounds
