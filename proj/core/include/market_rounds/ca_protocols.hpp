#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "market_rounds/core.hpp"
#include "market_rounds/transcript.hpp"

namespace market_rounds {

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pairwise-disjoint bundles of one size, each fully valued under some clause.
struct BundleReport {
  PlayerId player = 0;
  std::size_t bundle_size = 0;
  std::vector<ItemSet> bundles;
};

/// Greedy maximal report: clauses in ascending index; within a clause, repeatedly take the
/// `size` lowest-index unused clause items that lie inside `universe`.
BundleReport report_maximal_disjoint_bundles(const BinaryXOSValuation& v, std::size_t size,
                                             std::span<const ItemId> universe, PlayerId player = 0);

/// The proxy v'_i(S) = max over reported T of |T ∩ S| (level 1).
BinaryXOSValuation make_proxy(const BundleReport& report, std::uint32_t m);

enum class ProxyMode { Exact, Greedy, Auto };
const char* to_string(ProxyMode mode);
ProxyMode parse_proxy_mode(std::string_view text);

inline constexpr std::size_t kDefaultProxyCap = 20;

struct ProxyAllocation {
  Allocation allocation;
  std::size_t proxy_units = 0;  // sum_i v'_i(A_i)
  bool greedy = false;
};

/// Best allocation with respect to the proxies.
///
/// Exact: search over "each player takes at most one reported bundle"; for proxies built from
/// disjoint bundles the value of any bundle is its overlap with a single reported set, so the
/// restriction loses nothing. Throws CapExceeded when more than `cap` bundles are reported.
/// Greedy: players by largest reported bundle first (ties by id), each taking the unallocated
/// remainder of its fullest bundle. Auto: exact within the cap, greedy beyond it.
///
/// Either way, reported items left over afterwards go to the lowest-id player that reported
/// them; proxies are monotone, so this never lowers the proxy welfare.
ProxyAllocation best_allocation_wrt_proxy(std::span<const BinaryXOSValuation> proxies, std::uint32_t m,
                                          ProxyMode mode, std::size_t cap = kDefaultProxyCap);

struct CaRun {
  Allocation allocation;
  Transcript transcript;
  std::vector<BundleReport> reports;
  bool greedy = false;
};

/// One round: every player reports maximal disjoint bundles of size t/2 over all items; the
/// referee allocates optimally (or greedily) against the proxies.
CaRun simultaneous_t_restricted(std::span<const BinaryXOSValuation> players, std::uint32_t t, ProxyMode mode,
                                std::size_t cap = kDefaultProxyCap);

/// Same protocol with an explicit bundle size (used by the reduction pipeline for t = 1).
CaRun simultaneous_with_bundle_size(std::span<const BinaryXOSValuation> players, std::size_t bundle_size,
                                    ProxyMode mode, std::size_t cap = kDefaultProxyCap);

struct KRoundCaRound {
  std::vector<PlayerId> active;            // N_r
  ItemSet available;                       // U_r
  std::vector<ItemSet> player_universe;    // U_{r,i}, indexed by player (empty when inactive)
  std::vector<BundleReport> reports;       // S_{r,i} for active players
  std::vector<std::pair<PlayerId, ItemSet>> grants;
};

struct KRoundCaResult {
  Allocation allocation;
  Transcript transcript;
  std::vector<KRoundCaRound> rounds;
};

/// True iff remaining / size >= m^(-1/(k+1)), i.e. remaining^(k+1) * m >= size^(k+1), in exact integers.
bool meets_grant_threshold(std::size_t remaining, std::size_t size, std::uint32_t m, std::uint32_t k);

/// k rounds; in round r each remaining player reports maximal disjoint bundles of size
/// floor(t/(2k)) inside its current universe, and an ascending-id sweep grants the unallocated
/// remainder of the player's fullest bundle that still has at least an m^(-1/(k+1)) fraction free.
KRoundCaResult k_round_t_restricted(std::span<const BinaryXOSValuation> players, std::uint32_t t, std::uint32_t k);

KRoundCaResult k_round_with_bundle_size(std::span<const BinaryXOSValuation> players, std::size_t bundle_size,
                                        std::uint32_t k);

bool is_power_of_two(std::uint64_t x);

}  // namespace market_rounds
