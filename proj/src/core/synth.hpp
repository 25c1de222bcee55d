#pragma once

// Synthetic multi-asset order flow with controllable liquidity commonality,
// spike tails and resilience.
//
// Each asset's log spread is
//   log S = log base + vol * (l F + sqrt(1 - l^2) E) + J
// where F (shared by all assets on a day) and E are unit-variance
// jump-driven Ornstein-Uhlenbeck processes: between jumps they decay towards
// zero with their half-life, and normal jumps arrive at a rate proportional
// to 1 / half-life. Their law is therefore a pure time rescaling of the
// half-life, and so are exceedance durations. J holds lognormal spikes that
// decay with the asset's half-life. The latent spread is rounded to ticks and
// translated to order events; background order churn never touches the best
// prices, so the reconstructed spread equals the latent spread exactly.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/lob.hpp"
#include "core/sampling.hpp"

namespace lobres::synth {

struct SynthSpec {
  int n_assets = 10;
  int days = 5;
  lob::TimestampMs open_ms = 8 * 3600 * 1000;
  lob::TimestampMs session_ms = 30 * 60 * 1000;
  lob::TimestampMs step_ms = 100;   // latent process resolution

  double base_spread = 20.0;        // ticks
  double spread_vol = 0.35;         // sd of the log spread from F and E
  lob::Ticks max_spread = 500;

  /// Per asset; empty means `default_loading` for every asset.
  std::vector<double> loadings;
  double default_loading = 0.8;
  /// Per asset, ms; empty means `default_half_life_ms`.
  std::vector<double> half_lives_ms;
  double default_half_life_ms = 5000.0;
  /// Lognormal sigma of spike magnitudes per asset; 0 disables spikes.
  std::vector<double> tail_sigmas;
  double default_tail_sigma = 0.0;

  double common_half_life_ms = 60000.0;
  double jumps_per_half_life = 2.0;
  /// Sd of a per (asset, day) log multiplier on the half-life.
  double half_life_jitter = 0.0;
  double spike_rate = 0.01;         // per second
  double spike_scale = 1.0;         // median jump of the log spread

  double event_rate = 4.0;          // background churn events per second
  double execute_share = 0.3;       // removed touch levels executed rather than cancelled
  double mid_vol = 0.5;             // ticks per sqrt(second)
  int depth = 5;
  lob::Volume lot = 100;
  lob::Ticks start_price = 10000;

  std::uint64_t seed = 1;
  std::string symbol_prefix = "SYN";

  void validate() const;
  [[nodiscard]] double loading(int asset) const;
  [[nodiscard]] double half_life_ms(int asset) const;
  [[nodiscard]] double tail_sigma(int asset) const;
  [[nodiscard]] std::string symbol(int asset) const;
  [[nodiscard]] static std::string day_label(int day);
  [[nodiscard]] lob::SessionWindow session() const { return {open_ms, open_ms + session_ms}; }
};

/// Latent spread and mid price, one entry per step starting at open.
struct LatentPath {
  std::vector<lob::TimestampMs> times_ms;
  std::vector<lob::Ticks> spread;
  std::vector<lob::Ticks> best_bid;
  double half_life_ms = 0.0;  // after the per-day jitter
};

LatentPath simulate_latent(const SynthSpec& spec, int asset, int day);

/// Order events for one asset-day, valid under CrossPolicy::Reject.
std::vector<lob::OrderEvent> generate_events(const SynthSpec& spec, int asset, int day);

struct GeneratedFile {
  std::string symbol;
  std::string day;
  std::filesystem::path path;
};

/// Writes `<symbol>_<day>.csv` for every asset-day into `out_dir`.
std::vector<GeneratedFile> generate_panel(const SynthSpec& spec, const std::filesystem::path& out_dir,
                                          unsigned workers = 1);

}  // namespace lobres::synth
