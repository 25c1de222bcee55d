#include "core/ted.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace lobres::ted {

namespace {
bool exceeds(double value, double c) { return std::isnan(value) || value > c; }
}  // namespace

ExceedanceTracker::Step ExceedanceTracker::observe(TimestampMs t, double value) {
  Step step;
  const bool now_above = exceeds(value, threshold_);
  if (!started_) {
    started_ = true;
    above_ = now_above;
    censored_ = now_above;
    start_ = t;
    return step;
  }
  if (!above_ && now_above) {
    above_ = true;
    censored_ = false;
    start_ = t;
    step.upcross = true;
  } else if (above_ && !now_above) {
    above_ = false;
    if (!censored_) step.completed = liquidity::Episode{start_, t - start_};
    censored_ = false;
  }
  return step;
}

Extraction scan_exceedances(const lob::LiquiditySeries& series, double c) {
  Extraction out;
  ExceedanceTracker tracker(c);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto step = tracker.observe(series.times_ms[i], series.values[i]);
    if (i == 0 && tracker.in_censored_episode()) ++out.left_censored;
    if (step.completed) {
      TedRecord r;
      r.start_ms = step.completed->start_ms;
      r.duration_ms = step.completed->duration_ms;
      r.threshold = c;
      out.episodes.push_back(r);
    }
  }
  if (tracker.above()) ++out.right_censored;
  return out;
}

std::vector<TedRecord> extract_teds(const lob::LiquiditySeries& series, double c) {
  return scan_exceedances(series, c).episodes;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) fail(ErrorCode::InvalidArgument, "quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DecileThresholds decile_thresholds(std::span<const double> values) {
  std::vector<double> finite;
  finite.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  std::sort(finite.begin(), finite.end());
  if (finite.empty() || finite.front() == finite.back()) {
    fail(ErrorCode::DegenerateDistribution, "need at least two distinct finite values for deciles");
  }
  DecileThresholds out;
  for (std::size_t j = 0; j < kThresholdCount; ++j) {
    out.values[j] = quantile_sorted(finite, 0.1 * static_cast<double>(j + 1));
    if (j > 0 && out.values[j] <= out.values[j - 1]) out.collapsed = true;
  }
  return out;
}

std::vector<TedRecord> collect_ted_records(std::span<const lob::OrderEvent> events,
                                           const liquidity::MeasureSpec& measure,
                                           const lob::SessionWindow& session,
                                           std::span<const double> thresholds, lob::CrossPolicy policy) {
  measure.validate();
  const std::size_t nthr = thresholds.size();
  std::vector<ExceedanceTracker> trackers;
  trackers.reserve(nthr);
  for (double c : thresholds) trackers.emplace_back(c);
  std::vector<std::vector<liquidity::Episode>> history(nthr);
  std::vector<std::optional<TedRecord>> pending(nthr);
  std::vector<std::vector<TedRecord>> done(nthr);

  const std::size_t depth = std::max<std::size_t>(5, liquidity::levels_needed(measure));
  lob::OrderBook book(policy);
  std::optional<liquidity::Trigger> trigger;

  auto observe = [&](TimestampMs t) {
    const lob::BookState state = book.snapshot(depth);
    const double value = liquidity::evaluate(state, measure);
    for (std::size_t j = 0; j < nthr; ++j) {
      const auto step = trackers[j].observe(t, value);
      if (step.completed) {
        history[j].push_back(*step.completed);
        if (pending[j]) {
          pending[j]->duration_ms = step.completed->duration_ms;
          done[j].push_back(*pending[j]);
          pending[j].reset();
        }
      }
      if (step.upcross) {
        liquidity::CovariateContext ctx;
        ctx.exceedance_ms = t;
        ctx.session_open_ms = session.open_ms;
        ctx.lm_value = value;
        TedRecord r;
        r.start_ms = t;
        r.threshold = thresholds[j];
        r.threshold_index = static_cast<int>(j + 1);
        r.covariates = liquidity::covariates(state, history[j], trigger, ctx);
        pending[j] = r;
      }
    }
  };

  std::size_t i = 0;
  while (i < events.size() && events[i].timestamp_ms <= session.open_ms) book.apply(events[i++]);
  observe(session.open_ms);
  while (i < events.size() && events[i].timestamp_ms < session.close_ms) {
    const TimestampMs t = events[i].timestamp_ms;
    while (i < events.size() && events[i].timestamp_ms == t) {
      const auto outcome = book.apply(events[i]);
      trigger = liquidity::Trigger{events[i].kind, outcome.side, outcome.executed_at_touch};
      ++i;
    }
    observe(t);
  }

  std::vector<TedRecord> out;
  for (auto& d : done) out.insert(out.end(), d.begin(), d.end());
  return out;
}

}  // namespace lobres::ted
