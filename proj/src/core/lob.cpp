#include "core/lob.hpp"

#include <algorithm>
#include <sstream>

#include "core/error.hpp"

namespace lobres::lob {

std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::Submit: return "submit";
    case EventKind::Execute: return "execute";
    case EventKind::Cancel: return "cancel";
  }
  return "?";
}

std::string_view to_string(Side s) noexcept { return s == Side::Bid ? "bid" : "ask"; }

double BookState::midprice() const {
  if (!has_both_sides()) fail(ErrorCode::EmptySide, "midprice requires both sides");
  return 0.5 * static_cast<double>(asks.front().price + bids.front().price);
}

std::string check_invariants(const BookState& book) {
  std::ostringstream err;
  auto check_side = [&](const std::vector<Level>& levels, bool descending, std::string_view name) {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const Level& l = levels[i];
      if (l.total_volume <= 0 || l.order_count <= 0) {
        err << name << " level " << i << " is empty or negative; ";
      }
      if (i > 0) {
        const bool ordered = descending ? levels[i].price < levels[i - 1].price
                                        : levels[i].price > levels[i - 1].price;
        if (!ordered) err << name << " level " << i << " out of order; ";
      }
    }
  };
  check_side(book.bids, true, "bid");
  check_side(book.asks, false, "ask");
  if (book.has_both_sides() && book.asks.front().price <= book.bids.front().price) {
    err << "crossed book; ";
  }
  return err.str();
}

ApplyOutcome OrderBook::apply(const OrderEvent& e) {
  if (last_ts_ && e.timestamp_ms < *last_ts_) {
    fail(ErrorCode::NonMonotonicTimestamp,
         "timestamp " + std::to_string(e.timestamp_ms) + " precedes " + std::to_string(*last_ts_));
  }
  if (e.volume <= 0) {
    fail(ErrorCode::InvalidArgument, "event for order " + std::to_string(e.order_id) + " has non-positive volume");
  }

  ApplyOutcome outcome;
  outcome.side = e.side;
  switch (e.kind) {
    case EventKind::Submit:
      submit(e, outcome);
      break;
    case EventKind::Execute:
    case EventKind::Cancel: {
      auto it = orders_.find(e.order_id);
      if (it == orders_.end()) {
        fail(ErrorCode::UnknownOrderId, "unknown order id " + std::to_string(e.order_id));
      }
      const Resting& r = it->second;
      if (r.side != e.side) {
        fail(ErrorCode::InvalidArgument, "side mismatch for order " + std::to_string(e.order_id));
      }
      if (e.volume > r.volume) {
        fail(ErrorCode::VolumeExceedsResting,
             "order " + std::to_string(e.order_id) + ": volume " + std::to_string(e.volume) +
                 " exceeds resting " + std::to_string(r.volume));
      }
      if (e.kind == EventKind::Execute) {
        const auto best = r.side == Side::Bid ? best_bid() : best_ask();
        outcome.executed_at_touch = best && *best == r.price;
      }
      reduce(e.order_id, e.volume);
      break;
    }
  }
  last_ts_ = e.timestamp_ms;
  return outcome;
}

void OrderBook::submit(const OrderEvent& e, ApplyOutcome& outcome) {
  if (e.price <= 0) fail(ErrorCode::InvalidArgument, "submit with non-positive price");
  if (orders_.count(e.order_id) != 0) {
    fail(ErrorCode::DuplicateOrderId, "duplicate order id " + std::to_string(e.order_id));
  }

  const bool is_bid = e.side == Side::Bid;
  const auto opposite = is_bid ? best_ask() : best_bid();
  const bool crosses = opposite && (is_bid ? e.price >= *opposite : e.price <= *opposite);
  if (!crosses) {
    insert_resting(e.order_id, e.side, e.price, e.volume);
    return;
  }
  if (policy_ == CrossPolicy::Reject) {
    fail(ErrorCode::CrossedBookRejected,
         "submit " + std::to_string(e.order_id) + " at " + std::to_string(e.price) + " would cross the book");
  }

  // Price-time priority against the opposite side.
  SideMap& book = side_map(is_bid ? Side::Ask : Side::Bid);
  Volume remaining = e.volume;
  while (remaining > 0 && !book.empty()) {
    auto level = is_bid ? book.begin() : std::prev(book.end());
    if (is_bid ? level->first > e.price : level->first < e.price) break;
    const OrderId head = level->second.queue.front();
    const Volume fill = std::min(remaining, orders_.at(head).volume);
    reduce(head, fill);
    remaining -= fill;
    outcome.matched_volume += fill;
  }
  outcome.executed_at_touch = true;
  outcome.side = is_bid ? Side::Ask : Side::Bid;
  if (remaining > 0) insert_resting(e.order_id, e.side, e.price, remaining);
}

void OrderBook::insert_resting(OrderId id, Side side, Ticks price, Volume volume) {
  LevelQueue& level = side_map(side)[price];
  level.volume += volume;
  level.queue.push_back(id);
  orders_.emplace(id, Resting{side, price, volume, std::prev(level.queue.end())});
}

void OrderBook::reduce(OrderId id, Volume volume) {
  auto it = orders_.find(id);
  Resting& r = it->second;
  SideMap& map = side_map(r.side);
  auto level = map.find(r.price);
  level->second.volume -= volume;
  r.volume -= volume;
  if (r.volume == 0) {
    level->second.queue.erase(r.position);
    orders_.erase(it);
    if (level->second.queue.empty()) map.erase(level);
  }
}

BookState OrderBook::snapshot(std::size_t max_levels) const {
  BookState s;
  const std::size_t nb = std::min(max_levels, bids_.size());
  const std::size_t na = std::min(max_levels, asks_.size());
  s.bids.reserve(nb);
  s.asks.reserve(na);
  for (auto it = bids_.rbegin(); it != bids_.rend() && s.bids.size() < nb; ++it) {
    s.bids.push_back({it->first, it->second.volume, static_cast<std::int64_t>(it->second.queue.size())});
  }
  for (auto it = asks_.begin(); it != asks_.end() && s.asks.size() < na; ++it) {
    s.asks.push_back({it->first, it->second.volume, static_cast<std::int64_t>(it->second.queue.size())});
  }
  return s;
}

std::optional<Ticks> OrderBook::best_bid() const {
  if (bids_.empty()) return std::nullopt;
  return bids_.rbegin()->first;
}

std::optional<Ticks> OrderBook::best_ask() const {
  if (asks_.empty()) return std::nullopt;
  return asks_.begin()->first;
}

std::size_t OrderBook::level_count(Side side) const noexcept { return side_map(side).size(); }

Volume OrderBook::resting_volume(OrderId id) const {
  auto it = orders_.find(id);
  return it == orders_.end() ? 0 : it->second.volume;
}

std::vector<OrderId> OrderBook::orders_at(Side side, Ticks price) const {
  const SideMap& map = side_map(side);
  auto it = map.find(price);
  if (it == map.end()) return {};
  return {it->second.queue.begin(), it->second.queue.end()};
}

}  // namespace lobres::lob
