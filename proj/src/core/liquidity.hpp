#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>

#include "core/lob.hpp"

namespace lobres::liquidity {

using lob::BookState;
using lob::TimestampMs;

enum class MeasureKind : std::uint8_t { Spread, Xlm };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::Spread;
  /// Round-trip size R cap. Share units unless currency_mode is set.
  double r_cap = 25000.0;
  /// 0 means the full book.
  std::size_t max_levels = 0;
  /// Interpret r_cap as currency and convert to shares at the midprice.
  bool currency_mode = false;
  double tick_size = 0.01;

  void validate() const;
};

std::string_view to_string(MeasureKind k) noexcept;
MeasureKind parse_measure_kind(std::string_view s);

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

/// Inside spread in ticks. Throws EmptySide.
lob::Ticks spread(const BookState& book);

/// Xetra liquidity measure in ticks per share, R = min(cap, ask depth, bid depth).
/// Throws EmptySide or DegenerateR.
double xlm(const BookState& book, const MeasureSpec& spec);

/// Measure value, or kMissing when the book cannot support it.
double evaluate(const BookState& book, const MeasureSpec& spec) noexcept;

/// Levels a measure needs from a snapshot.
std::size_t levels_needed(const MeasureSpec& spec) noexcept;

/// One completed exceedance episode, as seen by covariate construction.
struct Episode {
  TimestampMs start_ms = 0;
  TimestampMs duration_ms = 0;
  [[nodiscard]] TimestampMs end_ms() const noexcept { return start_ms + duration_ms; }
};

inline constexpr std::size_t kCovariateCount = 10;

/// x1..x10 stored at index 0..9.
struct CovariateVector {
  std::array<double, kCovariateCount> x{};

  double& operator[](std::size_t i) { return x[i]; }
  double operator[](std::size_t i) const { return x[i]; }
  bool operator==(const CovariateVector&) const = default;
};

inline constexpr std::array<std::string_view, kCovariateCount> kCovariateNames = {
    "ask_orders_l5", "bid_orders_l5", "ask_volume_l5", "bid_volume_l5", "lm_at_exceedance",
    "teds_last_1s",  "ms_since_last", "mean_last5_ted", "buy_market_order", "sell_market_order"};

/// The event that moved the measure over the threshold.
struct Trigger {
  lob::EventKind kind = lob::EventKind::Submit;
  lob::Side side = lob::Side::Bid;
  bool executed_at_touch = false;
};

struct CovariateContext {
  TimestampMs exceedance_ms = 0;
  TimestampMs session_open_ms = 0;
  double lm_value = kMissing;
  TimestampMs window_ms = 1000;
};

/// Covariates at an exceedance. `history` holds completed episodes in time
/// order. Before any episode: x7 counts from session open and x8 is missing.
CovariateVector covariates(const BookState& book, std::span<const Episode> history,
                           const std::optional<Trigger>& trigger, const CovariateContext& ctx);

}  // namespace lobres::liquidity
