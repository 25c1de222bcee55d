#pragma once

// Independent reference implementations used by the tests. They trade speed
// for obviousness and share no code with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <unordered_map>
#include <vector>

#include "core/lob.hpp"
#include "core/sampling.hpp"
#include "core/ted.hpp"

namespace oracle {

using lobres::lob::EventKind;
using lobres::lob::OrderEvent;
using lobres::lob::Side;

struct RawOrder {
  Side side;
  std::int64_t price;
  std::int64_t volume;
};

/// Rebuilds the book from nothing by applying every event up to `until`.
inline std::unordered_map<std::uint64_t, RawOrder> replay(const std::vector<OrderEvent>& events, std::int64_t until) {
  std::unordered_map<std::uint64_t, RawOrder> orders;
  for (const auto& e : events) {
    if (e.timestamp_ms > until) break;
    if (e.kind == EventKind::Submit) {
      orders[e.order_id] = {e.side, e.price, e.volume};
    } else {
      auto& o = orders.at(e.order_id);
      o.volume -= e.volume;
      if (o.volume == 0) orders.erase(e.order_id);
    }
  }
  return orders;
}

/// (price, volume) per level; bids descending, asks ascending.
inline void levels(const std::unordered_map<std::uint64_t, RawOrder>& orders,
                   std::vector<std::pair<std::int64_t, std::int64_t>>& bids,
                   std::vector<std::pair<std::int64_t, std::int64_t>>& asks) {
  std::map<std::int64_t, std::int64_t> b;
  std::map<std::int64_t, std::int64_t> a;
  for (const auto& [id, o] : orders) (o.side == Side::Bid ? b : a)[o.price] += o.volume;
  bids.assign(b.rbegin(), b.rend());
  asks.assign(a.begin(), a.end());
}

inline double spread(const std::unordered_map<std::uint64_t, RawOrder>& orders) {
  std::vector<std::pair<std::int64_t, std::int64_t>> bids;
  std::vector<std::pair<std::int64_t, std::int64_t>> asks;
  levels(orders, bids, asks);
  if (bids.empty() || asks.empty()) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(asks.front().first - bids.front().first);
}

/// Literal XLM: fill R shares on each side level by level, premiums against
/// the midpoint. Integer R keeps the numerator exact; everything is in half
/// ticks until the final division.
inline double xlm(const std::unordered_map<std::uint64_t, RawOrder>& orders, std::int64_t cap) {
  std::vector<std::pair<std::int64_t, std::int64_t>> bids;
  std::vector<std::pair<std::int64_t, std::int64_t>> asks;
  levels(orders, bids, asks);
  if (bids.empty() || asks.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::int64_t depth_a = 0;
  std::int64_t depth_b = 0;
  for (auto& l : asks) depth_a += l.second;
  for (auto& l : bids) depth_b += l.second;
  const std::int64_t r = std::min({cap, depth_a, depth_b});
  const std::int64_t mid2 = asks.front().first + bids.front().first;
  auto cost = [&](const std::vector<std::pair<std::int64_t, std::int64_t>>& side, bool ask) {
    std::int64_t left = r;
    std::int64_t total = 0;
    for (const auto& [p, v] : side) {
      const std::int64_t take = std::min(left, v);
      total += take * (ask ? 2 * p - mid2 : mid2 - 2 * p);
      left -= take;
      if (left == 0) break;
    }
    return total;
  };
  return static_cast<double>(cost(asks, true) + cost(bids, false)) / (2.0 * static_cast<double>(r));
}

/// Random valid stream under the reject policy: submits never cross, cancels
/// and executions reference resting orders with at most their volume.
inline std::vector<OrderEvent> random_stream(std::mt19937_64& rng, std::size_t n, std::int64_t start_ms,
                                             std::int64_t mean_gap_ms) {
  std::vector<OrderEvent> out;
  std::unordered_map<std::uint64_t, RawOrder> live;
  std::vector<std::uint64_t> ids;
  std::map<std::int64_t, std::int64_t> bid_count;
  std::map<std::int64_t, std::int64_t> ask_count;
  std::uint64_t next_id = 1;
  std::int64_t t = start_ms;
  std::uniform_real_distribution<double> u;
  std::geometric_distribution<int> gap(1.0 / static_cast<double>(mean_gap_ms + 1));
  while (out.size() < n) {
    t += gap(rng);
    const double r = u(rng);
    if (ids.empty() || r < 0.5) {
      const Side side = u(rng) < 0.5 ? Side::Bid : Side::Ask;
      std::int64_t price;
      if (side == Side::Bid) {
        const std::int64_t best_ask = ask_count.empty() ? 1010 : ask_count.begin()->first;
        price = best_ask - 1 - std::uniform_int_distribution<std::int64_t>(0, 8)(rng);
      } else {
        const std::int64_t best_bid = bid_count.empty() ? 990 : bid_count.rbegin()->first;
        price = best_bid + 1 + std::uniform_int_distribution<std::int64_t>(0, 8)(rng);
      }
      if (price <= 0) continue;
      const std::int64_t vol = std::uniform_int_distribution<std::int64_t>(1, 500)(rng);
      const std::uint64_t id = next_id++;
      out.push_back({t, "X", EventKind::Submit, side, id, price, vol});
      live[id] = {side, price, vol};
      ids.push_back(id);
      ++(side == Side::Bid ? bid_count : ask_count)[price];
    } else {
      const std::size_t k = std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng);
      const std::uint64_t id = ids[k];
      RawOrder& o = live.at(id);
      const bool full = u(rng) < 0.6;
      const std::int64_t vol = full ? o.volume : std::uniform_int_distribution<std::int64_t>(1, o.volume)(rng);
      out.push_back({t, "X", u(rng) < 0.5 ? EventKind::Cancel : EventKind::Execute, o.side, id, o.price, vol});
      o.volume -= vol;
      if (o.volume == 0) {
        auto& counts = o.side == Side::Bid ? bid_count : ask_count;
        if (--counts[o.price] == 0) counts.erase(o.price);
        live.erase(id);
        ids[k] = ids.back();
        ids.pop_back();
      }
    }
  }
  return out;
}

/// Exceedance episodes by a direct scan of the indicator {value > c or missing}.
struct Episode {
  std::int64_t start;
  std::int64_t duration;
  bool operator==(const Episode&) const = default;
};

inline std::vector<Episode> scan(const std::vector<std::int64_t>& t, const std::vector<double>& v, double c) {
  std::vector<bool> above(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) above[i] = std::isnan(v[i]) || v[i] > c;
  std::vector<Episode> out;
  std::size_t i = 0;
  while (i < v.size()) {
    if (!above[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < v.size() && above[j]) ++j;
    // Runs touching either end of the series are censored.
    if (i > 0 && j < v.size()) out.push_back({t[i], t[j] - t[i]});
    i = j;
  }
  return out;
}

}  // namespace oracle
