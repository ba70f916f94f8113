#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "market_rounds/core.hpp"

namespace market_rounds {

/// How a blackboard message is encoded. Bit costs are a fixed function of the kind and
/// the payload length, so every total can be recomputed from the payloads alone.
enum class MessageKind : std::uint8_t {
  ItemIndex,  // one index: index_bits(U)
  Bundle,     // length prefix count_bits(U) followed by one index per element
  Count,      // a single count in [0, U]: count_bits(U)
  Level,      // signed binary exponent of a power-of-two level: 32 bits
};

const char* to_string(MessageKind kind);

/// max(1, ceil(log2 universe)).
std::uint32_t index_bits(std::uint64_t universe);
/// ceil(log2(universe + 1)).
std::uint32_t count_bits(std::uint64_t universe);

std::uint64_t encoded_bits(MessageKind kind, std::size_t payload_size, std::uint64_t universe);

struct Message {
  PlayerId player = 0;
  MessageKind kind = MessageKind::ItemIndex;
  std::vector<std::int64_t> payload;
  std::uint64_t bits = 0;

  friend bool operator==(const Message&, const Message&) = default;
};

/// Per-round, per-player log of everything written on the blackboard.
class Transcript {
 public:
  Transcript() = default;
  explicit Transcript(std::uint64_t universe) : universe_(universe) {}

  /// Opens a new (initially empty) round.
  void begin_round();
  /// Appends a message to the current round, opening round 1 if none is open.
  void post(PlayerId player, MessageKind kind, std::vector<std::int64_t> payload);
  void post_item(PlayerId player, ItemId item);
  void post_bundle(PlayerId player, std::span<const ItemId> bundle);

  /// Appends `other` round-by-round: round r of `other` is merged into round `offset + r` of this.
  void merge(const Transcript& other, std::size_t offset = 0);

  [[nodiscard]] std::uint64_t universe() const { return universe_; }
  [[nodiscard]] const std::vector<std::vector<Message>>& rounds() const { return rounds_; }
  [[nodiscard]] std::size_t total_rounds() const { return rounds_.size(); }
  [[nodiscard]] std::uint64_t total_bits() const { return total_bits_; }
  [[nodiscard]] std::size_t message_count() const;
  [[nodiscard]] std::vector<std::uint64_t> bits_per_round() const;
  [[nodiscard]] std::uint64_t bits_of(PlayerId player) const;
  [[nodiscard]] std::uint64_t max_player_bits() const;

  /// Recomputes every bit count from the payloads and checks the cached totals.
  [[nodiscard]] bool verify() const;

 private:
  std::uint64_t universe_ = 1;
  std::vector<std::vector<Message>> rounds_;
  std::uint64_t total_bits_ = 0;
};

}  // namespace market_rounds
