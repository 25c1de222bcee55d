#pragma once

// Threshold exceedance durations (TEDs).
//
// An exceedance starts when the measure moves from <= c to > c (larger values
// are less liquid) and lasts until the first return to <= c. Values are
// treated as a step function between observations. Missing values count as
// above every threshold: an empty side is the least liquid state there is.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "core/liquidity.hpp"
#include "core/sampling.hpp"

namespace lobres::ted {

using lob::TimestampMs;

inline constexpr std::size_t kThresholdCount = 9;

struct TedRecord {
  TimestampMs start_ms = 0;
  TimestampMs duration_ms = 0;
  double threshold = 0.0;
  int threshold_index = 0;  // 1..9
  liquidity::CovariateVector covariates;

  bool operator==(const TedRecord&) const = default;
};

struct Extraction {
  std::vector<TedRecord> episodes;
  int left_censored = 0;   // series started above c
  int right_censored = 0;  // series ended above c
};

/// Maximal episodes above `c`, observed until the last sample. Censored
/// episodes are dropped and counted; a series above `c` throughout counts at
/// both ends.
Extraction scan_exceedances(const lob::LiquiditySeries& series, double c);

std::vector<TedRecord> extract_teds(const lob::LiquiditySeries& series, double c);

/// Streaming form of scan_exceedances, one per threshold.
class ExceedanceTracker {
 public:
  explicit ExceedanceTracker(double threshold) : threshold_(threshold) {}

  struct Step {
    bool upcross = false;
    std::optional<liquidity::Episode> completed;
  };

  Step observe(TimestampMs t, double value);
  [[nodiscard]] bool above() const noexcept { return above_; }
  [[nodiscard]] bool in_censored_episode() const noexcept { return above_ && censored_; }
  [[nodiscard]] double threshold() const noexcept { return threshold_; }

 private:
  double threshold_;
  bool started_ = false;
  bool above_ = false;
  bool censored_ = false;
  TimestampMs start_ = 0;
};

struct DecileThresholds {
  std::array<double, kThresholdCount> values{};
  /// Some neighbouring deciles coincide (heavily discrete measure).
  bool collapsed = false;
};

/// Type-7 empirical quantiles at 0.1..0.9 over the finite values.
/// Throws DegenerateDistribution with fewer than two distinct values.
DecileThresholds decile_thresholds(std::span<const double> values);

/// Type-7 quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double p);

/// Replays one asset-day and records every completed exceedance at each
/// threshold together with its covariates. Records are ordered by threshold
/// index, then start time.
std::vector<TedRecord> collect_ted_records(std::span<const lob::OrderEvent> events,
                                           const liquidity::MeasureSpec& measure,
                                           const lob::SessionWindow& session,
                                           std::span<const double> thresholds,
                                           lob::CrossPolicy policy = lob::CrossPolicy::Reject);

}  // namespace lobres::ted
