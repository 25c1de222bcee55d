#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "core/liquidity.hpp"
#include "core/lob.hpp"

namespace lobres::lob {

struct SessionWindow {
  TimestampMs open_ms = 8 * 3600 * 1000;
  TimestampMs close_ms = 16 * 3600 * 1000 + 30 * 60 * 1000;

  [[nodiscard]] TimestampMs length_ms() const noexcept { return close_ms - open_ms; }
};

/// Evenly spaced (or, for event-time series, irregular) liquidity observations.
/// Missing values are NaN.
struct LiquiditySeries {
  std::vector<TimestampMs> times_ms;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
  bool operator==(const LiquiditySeries& o) const;  // NaN == NaN
};

/// One sample per boundary open + k*interval, k = 1..floor(length/interval),
/// measured on the book after every event stamped at or before the boundary.
LiquiditySeries sample_series(std::span<const OrderEvent> events, const liquidity::MeasureSpec& measure,
                              const SessionWindow& session, TimestampMs interval_ms,
                              CrossPolicy policy = CrossPolicy::Reject);

/// Measure after the last event of every distinct timestamp inside the
/// session, plus the value at session open. This is the resolution at which
/// exceedance durations are measured.
LiquiditySeries event_time_series(std::span<const OrderEvent> events, const liquidity::MeasureSpec& measure,
                                  const SessionWindow& session, CrossPolicy policy = CrossPolicy::Reject);

/// CSV with header time_s,value; missing values written as NA.
void write_series_csv(std::ostream& out, const LiquiditySeries& series);
void write_series_csv(const std::filesystem::path& path, const LiquiditySeries& series);
LiquiditySeries read_series_csv(const std::filesystem::path& path);
LiquiditySeries parse_series_csv(std::string_view text);

}  // namespace lobres::lob
