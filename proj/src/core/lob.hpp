#pragma once

/**
 * Limit order book reconstruction.
 *
 * Prices are integer ticks and volumes integer shares, so level aggregation
 * is exact. Each side keeps every level; callers choose how many levels a
 * snapshot exposes.
 */

#include <cstdint>
#include <limits>
#include <list>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lobres::lob {

using Ticks = std::int64_t;
using Volume = std::int64_t;
using OrderId = std::uint64_t;
using TimestampMs = std::int64_t;

enum class EventKind : std::uint8_t { Submit, Execute, Cancel };
enum class Side : std::uint8_t { Bid, Ask };

struct OrderEvent {
  TimestampMs timestamp_ms = 0;
  std::string symbol;
  EventKind kind = EventKind::Submit;
  Side side = Side::Bid;
  OrderId order_id = 0;
  Ticks price = 0;
  Volume volume = 0;

  bool operator==(const OrderEvent&) const = default;
};

struct Level {
  Ticks price = 0;
  Volume total_volume = 0;
  std::int64_t order_count = 0;

  bool operator==(const Level&) const = default;
};

/// Immutable level-aggregated view of a book. Bids are ordered best (highest)
/// first, asks best (lowest) first.
struct BookState {
  std::vector<Level> bids;
  std::vector<Level> asks;

  [[nodiscard]] bool has_both_sides() const noexcept { return !bids.empty() && !asks.empty(); }
  [[nodiscard]] const std::vector<Level>& side(Side s) const noexcept { return s == Side::Bid ? bids : asks; }
  /// (best ask + best bid) / 2 in ticks; requires both sides.
  [[nodiscard]] double midprice() const;

  bool operator==(const BookState&) const = default;
};

/// Structural checks: strict price ordering, positive volumes and counts,
/// uncrossed touch. Returns an empty string when valid.
std::string check_invariants(const BookState& book);

enum class CrossPolicy : std::uint8_t { Reject, AutoMatch };

/// What an applied event did to the touch; used for market-order trigger flags.
struct ApplyOutcome {
  bool executed_at_touch = false;
  Side side = Side::Bid;
  Volume matched_volume = 0;  // AutoMatch fills of an aggressive submit
};

class OrderBook {
 public:
  explicit OrderBook(CrossPolicy policy = CrossPolicy::Reject) : policy_(policy) {}

  /// Applies one event. Throws lobres::Error and leaves the book unchanged on
  /// invalid input.
  ApplyOutcome apply(const OrderEvent& e);

  static constexpr std::size_t kAllLevels = std::numeric_limits<std::size_t>::max();

  [[nodiscard]] BookState snapshot(std::size_t max_levels = kAllLevels) const;
  [[nodiscard]] std::optional<Ticks> best_bid() const;
  [[nodiscard]] std::optional<Ticks> best_ask() const;
  [[nodiscard]] std::size_t level_count(Side side) const noexcept;
  [[nodiscard]] std::size_t order_count() const noexcept { return orders_.size(); }
  [[nodiscard]] bool contains(OrderId id) const { return orders_.count(id) != 0; }
  /// Resting volume of an order, 0 if absent.
  [[nodiscard]] Volume resting_volume(OrderId id) const;
  [[nodiscard]] std::optional<TimestampMs> last_timestamp() const noexcept { return last_ts_; }
  [[nodiscard]] CrossPolicy policy() const noexcept { return policy_; }

  /// Ids resting at a price, in time priority.
  [[nodiscard]] std::vector<OrderId> orders_at(Side side, Ticks price) const;

 private:
  struct LevelQueue {
    Volume volume = 0;
    std::list<OrderId> queue;
  };
  struct Resting {
    Side side;
    Ticks price;
    Volume volume;
    std::list<OrderId>::iterator position;
  };
  using SideMap = std::map<Ticks, LevelQueue>;  // ascending price on both sides

  SideMap& side_map(Side s) noexcept { return s == Side::Bid ? bids_ : asks_; }
  const SideMap& side_map(Side s) const noexcept { return s == Side::Bid ? bids_ : asks_; }

  void submit(const OrderEvent& e, ApplyOutcome& outcome);
  void reduce(OrderId id, Volume volume);
  void insert_resting(OrderId id, Side side, Ticks price, Volume volume);

  CrossPolicy policy_;
  SideMap bids_;
  SideMap asks_;
  std::unordered_map<OrderId, Resting> orders_;
  std::optional<TimestampMs> last_ts_;
};

std::string_view to_string(EventKind k) noexcept;
std::string_view to_string(Side s) noexcept;

}  // namespace lobres::lob
