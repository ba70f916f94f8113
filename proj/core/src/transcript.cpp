#include "market_rounds/transcript.hpp"

#include <algorithm>
#include <map>

namespace market_rounds {

const char* to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::ItemIndex: return "item";
    case MessageKind::Bundle: return "bundle";
    case MessageKind::Count: return "count";
    case MessageKind::Level: return "level";
  }
  return "?";
}

namespace {

std::uint32_t ceil_log2(std::uint64_t x) {
  std::uint32_t bits = 0;
  while ((std::uint64_t{1} << bits) < x) ++bits;
  return bits;
}

}  // namespace

std::uint32_t index_bits(std::uint64_t universe) { return std::max<std::uint32_t>(1, ceil_log2(universe)); }

std::uint32_t count_bits(std::uint64_t universe) { return ceil_log2(universe + 1); }

std::uint64_t encoded_bits(MessageKind kind, std::size_t payload_size, std::uint64_t universe) {
  switch (kind) {
    case MessageKind::ItemIndex: return index_bits(universe);
    case MessageKind::Bundle: return count_bits(universe) + payload_size * index_bits(universe);
    case MessageKind::Count: return count_bits(universe);
    case MessageKind::Level: return 32;
  }
  return 0;
}

void Transcript::begin_round() { rounds_.emplace_back(); }

void Transcript::post(PlayerId player, MessageKind kind, std::vector<std::int64_t> payload) {
  if (rounds_.empty()) begin_round();
  const auto bits = encoded_bits(kind, payload.size(), universe_);
  rounds_.back().push_back(Message{player, kind, std::move(payload), bits});
  total_bits_ += bits;
}

void Transcript::post_item(PlayerId player, ItemId item) {
  post(player, MessageKind::ItemIndex, {static_cast<std::int64_t>(item)});
}

void Transcript::post_bundle(PlayerId player, std::span<const ItemId> bundle) {
  post(player, MessageKind::Bundle, std::vector<std::int64_t>(bundle.begin(), bundle.end()));
}

void Transcript::merge(const Transcript& other, std::size_t offset) {
  if (other.rounds_.empty()) return;
  const auto needed = offset + other.rounds_.size();
  if (rounds_.size() < needed) rounds_.resize(needed);
  for (std::size_t r = 0; r < other.rounds_.size(); ++r) {
    for (const auto& msg : other.rounds_[r]) {
      auto copy = msg;
      copy.bits = encoded_bits(copy.kind, copy.payload.size(), universe_);
      total_bits_ += copy.bits;
      rounds_[offset + r].push_back(std::move(copy));
    }
  }
}

std::size_t Transcript::message_count() const {
  std::size_t count = 0;
  for (const auto& round : rounds_) count += round.size();
  return count;
}

std::vector<std::uint64_t> Transcript::bits_per_round() const {
  std::vector<std::uint64_t> out;
  out.reserve(rounds_.size());
  for (const auto& round : rounds_) {
    std::uint64_t sum = 0;
    for (const auto& msg : round) sum += msg.bits;
    out.push_back(sum);
  }
  return out;
}

std::uint64_t Transcript::bits_of(PlayerId player) const {
  std::uint64_t sum = 0;
  for (const auto& round : rounds_) {
    for (const auto& msg : round) {
      if (msg.player == player) sum += msg.bits;
    }
  }
  return sum;
}

std::uint64_t Transcript::max_player_bits() const {
  std::map<PlayerId, std::uint64_t> per_player;
  for (const auto& round : rounds_) {
    for (const auto& msg : round) per_player[msg.player] += msg.bits;
  }
  std::uint64_t best = 0;
  for (const auto& [player, bits] : per_player) best = std::max(best, bits);
  return best;
}

bool Transcript::verify() const {
  std::uint64_t sum = 0;
  for (const auto& round : rounds_) {
    for (const auto& msg : round) {
      if (msg.bits != encoded_bits(msg.kind, msg.payload.size(), universe_)) return false;
      sum += msg.bits;
    }
  }
  return sum == total_bits_;
}

}  // namespace market_rounds
