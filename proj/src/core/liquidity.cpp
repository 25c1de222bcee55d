#include "core/liquidity.hpp"

#include <algorithm>
#include <string>

#include "core/error.hpp"

namespace lobres::liquidity {

void MeasureSpec::validate() const {
  if (!(r_cap > 0.0) || !std::isfinite(r_cap)) fail(ErrorCode::InvalidArgument, "xlm cap must be positive");
  if (currency_mode && !(tick_size > 0.0)) fail(ErrorCode::InvalidArgument, "tick size must be positive");
}

std::string_view to_string(MeasureKind k) noexcept { return k == MeasureKind::Spread ? "spread" : "xlm"; }

MeasureKind parse_measure_kind(std::string_view s) {
  if (s == "spread") return MeasureKind::Spread;
  if (s == "xlm") return MeasureKind::Xlm;
  fail(ErrorCode::InvalidArgument, "unknown measure '" + std::string(s) + "'");
}

lob::Ticks spread(const BookState& book) {
  if (!book.has_both_sides()) fail(ErrorCode::EmptySide, "spread needs both sides");
  return book.asks.front().price - book.bids.front().price;
}

namespace {

std::size_t usable_levels(const std::vector<lob::Level>& levels, std::size_t max_levels) {
  return max_levels == 0 ? levels.size() : std::min(max_levels, levels.size());
}

double side_depth(const std::vector<lob::Level>& levels, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += static_cast<double>(levels[i].total_volume);
  return total;
}

// Sum of volume * (distance from mid) over the cheapest R shares, in half ticks.
// Prices are doubled so the midprice stays integral.
double side_cost_half_ticks(const std::vector<lob::Level>& levels, std::size_t n, double r,
                            lob::Ticks twice_mid, bool ask) {
  double cost = 0.0;
  double filled = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double tv = static_cast<double>(levels[i].total_volume);
    const double distance = static_cast<double>(ask ? 2 * levels[i].price - twice_mid
                                                    : twice_mid - 2 * levels[i].price);
    if (filled + tv <= r) {
      cost += tv * distance;
      filled += tv;
    } else {
      // First level that cannot be taken whole absorbs the remainder.
      const double remainder = r - filled;
      if (remainder > 0.0) cost += remainder * distance;
      return cost;
    }
  }
  return cost;
}

}  // namespace

double xlm(const BookState& book, const MeasureSpec& spec) {
  spec.validate();
  if (!book.has_both_sides()) fail(ErrorCode::EmptySide, "xlm needs both sides");
  const std::size_t na = usable_levels(book.asks, spec.max_levels);
  const std::size_t nb = usable_levels(book.bids, spec.max_levels);
  const lob::Ticks twice_mid = book.asks.front().price + book.bids.front().price;

  double cap = spec.r_cap;
  if (spec.currency_mode) cap = spec.r_cap / (0.5 * static_cast<double>(twice_mid) * spec.tick_size);
  const double r = std::min({cap, side_depth(book.asks, na), side_depth(book.bids, nb)});
  if (!(r > 0.0)) fail(ErrorCode::DegenerateR, "xlm round-trip size is zero");

  const double ask = side_cost_half_ticks(book.asks, na, r, twice_mid, true);
  const double bid = side_cost_half_ticks(book.bids, nb, r, twice_mid, false);
  return (ask + bid) / (2.0 * r);
}

double evaluate(const BookState& book, const MeasureSpec& spec) noexcept {
  if (!book.has_both_sides()) return kMissing;
  try {
    if (spec.kind == MeasureKind::Spread) return static_cast<double>(spread(book));
    return xlm(book, spec);
  } catch (const Error&) {
    return kMissing;
  }
}

std::size_t levels_needed(const MeasureSpec& spec) noexcept {
  if (spec.kind == MeasureKind::Spread) return 1;
  return spec.max_levels == 0 ? lob::OrderBook::kAllLevels : spec.max_levels;
}

CovariateVector covariates(const BookState& book, std::span<const Episode> history,
                           const std::optional<Trigger>& trigger, const CovariateContext& ctx) {
  CovariateVector cv;
  constexpr std::size_t kDepth = 5;
  for (std::size_t i = 0; i < std::min(kDepth, book.asks.size()); ++i) {
    cv[0] += static_cast<double>(book.asks[i].order_count);
    cv[2] += static_cast<double>(book.asks[i].total_volume);
  }
  for (std::size_t i = 0; i < std::min(kDepth, book.bids.size()); ++i) {
    cv[1] += static_cast<double>(book.bids[i].order_count);
    cv[3] += static_cast<double>(book.bids[i].total_volume);
  }
  cv[4] = ctx.lm_value;

  const TimestampMs t = ctx.exceedance_ms;
  double recent = 0.0;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    const TimestampMs end = it->end_ms();
    if (end >= t - ctx.window_ms && end <= t) recent += 1.0;
    // History is ordered by start and episodes do not overlap, so ends are ordered too.
    if (end < t - ctx.window_ms) break;
  }
  cv[5] = recent;

  if (history.empty()) {
    cv[6] = static_cast<double>(t - ctx.session_open_ms);
    cv[7] = kMissing;
  } else {
    cv[6] = static_cast<double>(t - history.back().start_ms);
    const std::size_t n = std::min<std::size_t>(5, history.size());
    double sum = 0.0;
    for (std::size_t i = history.size() - n; i < history.size(); ++i) {
      sum += static_cast<double>(history[i].duration_ms);
    }
    cv[7] = sum / static_cast<double>(n);
  }

  if (trigger && trigger->executed_at_touch &&
      (trigger->kind == lob::EventKind::Execute || trigger->kind == lob::EventKind::Submit)) {
    // Lifting the ask is a buy, hitting the bid a sell.
    cv[8] = trigger->side == lob::Side::Ask ? 1.0 : 0.0;
    cv[9] = trigger->side == lob::Side::Bid ? 1.0 : 0.0;
  }
  return cv;
}

}  // namespace lobres::liquidity
