#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "core/error.hpp"
#include "core/event_io.hpp"
#include "core/sampling.hpp"
#include "core/synth.hpp"
#include "core/ted.hpp"

using namespace lobres;
using namespace lobres::synth;

namespace {

SynthSpec small_spec() {
  SynthSpec s;
  s.n_assets = 3;
  s.days = 2;
  s.session_ms = 10 * 60 * 1000;
  s.seed = 42;
  return s;
}

double corr(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0;
  double mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0;
  double saa = 0;
  double sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double median_ted_at_median_decile(const SynthSpec& spec, int asset, int day) {
  const auto events = generate_events(spec, asset, day);
  const auto session = spec.session();
  const auto sampled = lob::sample_series(events, {}, session, 1000);
  const auto thr = ted::decile_thresholds(sampled.values);
  const auto series = lob::event_time_series(events, {}, session);
  std::vector<double> d;
  for (const auto& r : ted::extract_teds(series, thr.values[4])) d.push_back(static_cast<double>(r.duration_ms));
  std::sort(d.begin(), d.end());
  return ted::quantile_sorted(d, 0.5);
}

}  // namespace

TEST(Synth, EventsValidUnderRejectPolicy) {
  const auto spec = small_spec();
  for (int a = 0; a < spec.n_assets; ++a) {
    const auto events = generate_events(spec, a, 0);
    lob::OrderBook book;
    for (const auto& e : events) {
      ASSERT_NO_THROW(book.apply(e));
      EXPECT_EQ(e.symbol, spec.symbol(a));
    }
    EXPECT_EQ(lob::check_invariants(book.snapshot()), "");
  }
}

TEST(Synth, ReconstructedSpreadFollowsLatentPath) {
  auto spec = small_spec();
  spec.default_tail_sigma = 0.8;
  spec.spike_rate = 0.05;
  const auto latent = simulate_latent(spec, 1, 1);
  const auto events = generate_events(spec, 1, 1);
  lob::OrderBook book;
  std::size_t i = 0;
  for (std::size_t k = 0; k < latent.times_ms.size(); ++k) {
    while (i < events.size() && events[i].timestamp_ms <= latent.times_ms[k]) book.apply(events[i++]);
    ASSERT_EQ(*book.best_ask() - *book.best_bid(), latent.spread[k]) << k;
    ASSERT_EQ(*book.best_bid(), latent.best_bid[k]) << k;
  }
}

TEST(Synth, FullLoadingsGiveCorrelatedSpreads) {
  auto spec = small_spec();
  spec.n_assets = 4;
  spec.session_ms = 60 * 60 * 1000;
  spec.default_loading = 1.0;
  spec.default_tail_sigma = 0.0;
  std::vector<std::vector<double>> s;
  for (int a = 0; a < spec.n_assets; ++a) {
    s.push_back(lob::sample_series(generate_events(spec, a, 0), {}, spec.session(), 1000).values);
  }
  for (int a = 0; a < spec.n_assets; ++a) {
    for (int b = a + 1; b < spec.n_assets; ++b) EXPECT_GT(corr(s[a], s[b]), 0.9);
  }
}

TEST(Synth, DoublingHalfLifeDoublesMedianTed) {
  SynthSpec spec;
  spec.n_assets = 1;
  spec.days = 1;
  spec.session_ms = 4 * 60 * 60 * 1000;
  spec.default_loading = 0.0;
  spec.seed = 3;
  spec.default_half_life_ms = 5000;
  const double base = median_ted_at_median_decile(spec, 0, 0);
  spec.default_half_life_ms = 10000;
  const double doubled = median_ted_at_median_decile(spec, 0, 0);
  EXPECT_NEAR(doubled / base, 2.0, 0.5) << base << " " << doubled;
}

TEST(Synth, PanelIsDeterministic) {
  const auto spec = small_spec();
  const auto dir = std::filesystem::temp_directory_path() / "lobres_synth_det";
  std::filesystem::remove_all(dir);
  const auto a = generate_panel(spec, dir / "a", 1);
  const auto b = generate_panel(spec, dir / "b", 3);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].path.filename(), b[i].path.filename());
    EXPECT_EQ(io::read_file(a[i].path), io::read_file(b[i].path));
  }
  EXPECT_EQ(a[0].path.filename().string(), "SYN00_d01.csv");
  std::filesystem::remove_all(dir);
}

TEST(Synth, AssetsDifferAndSeedsMatter) {
  auto spec = small_spec();
  EXPECT_NE(simulate_latent(spec, 0, 0).spread, simulate_latent(spec, 1, 0).spread);
  const auto before = simulate_latent(spec, 0, 0).spread;
  spec.seed = 43;
  EXPECT_NE(simulate_latent(spec, 0, 0).spread, before);
}

TEST(Synth, SpikesNeedTailSigma) {
  auto spec = small_spec();
  spec.spike_rate = 0.5;
  spec.default_loading = 0.0;
  spec.spread_vol = 0.0;
  const auto flat = simulate_latent(spec, 0, 0).spread;
  EXPECT_TRUE(std::all_of(flat.begin(), flat.end(), [&](auto s) { return s == flat.front(); }));
  spec.default_tail_sigma = 1.0;
  const auto spiky = simulate_latent(spec, 0, 0).spread;
  EXPECT_GT(*std::max_element(spiky.begin(), spiky.end()), 2 * flat.front());
}

TEST(Synth, RejectsInvalidSpecs) {
  auto spec = small_spec();
  spec.loadings = {0.5, 1.5, 0.2};
  EXPECT_THROW(spec.validate(), Error);
  spec = small_spec();
  spec.half_lives_ms = {1000};
  EXPECT_THROW(spec.validate(), Error);
  spec = small_spec();
  spec.default_half_life_ms = 0;
  EXPECT_THROW(spec.validate(), Error);
}
