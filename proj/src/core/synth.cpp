#include "core/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "core/error.hpp"
#include "core/event_io.hpp"
#include "core/parallel.hpp"

namespace lobres::synth {

namespace {

using lob::EventKind;
using lob::OrderEvent;
using lob::Side;
using lob::Ticks;
using lob::TimestampMs;
using lob::Volume;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t day, std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(day),
                    static_cast<std::uint32_t>(purpose)};
  return std::mt19937_64(seq);
}

/// Unit-variance jump-driven OU sampled every dt.
class JumpOu {
 public:
  JumpOu(double half_life_ms, double jumps_per_half_life, double dt_ms, std::mt19937_64& rng)
      : decay_(std::exp(-std::numbers::ln2 * dt_ms / half_life_ms)),
        jump_mean_(jumps_per_half_life * dt_ms / half_life_ms),
        jump_sd_(std::sqrt(2.0 * std::numbers::ln2 / jumps_per_half_life)) {
    value_ = std::normal_distribution<double>()(rng);
  }

  double step(std::mt19937_64& rng) {
    value_ *= decay_;
    const int jumps = std::poisson_distribution<int>(jump_mean_)(rng);
    std::normal_distribution<double> size(0.0, jump_sd_);
    for (int j = 0; j < jumps; ++j) value_ += size(rng);
    return value_;
  }
  [[nodiscard]] double value() const { return value_; }

 private:
  double decay_;
  double jump_mean_;
  double jump_sd_;
  double value_ = 0.0;
};

template <class T>
T pick(const std::vector<T>& v, int asset, T fallback) {
  return v.empty() ? fallback : v[static_cast<std::size_t>(asset)];
}

class EventWriter {
 public:
  EventWriter(std::string symbol, int depth, Volume lot, std::mt19937_64& rng)
      : symbol_(std::move(symbol)), depth_(depth), lot_(lot), rng_(rng) {}

  void submit(TimestampMs t, Side side, Ticks price) {
    const Volume v = lot_ * std::uniform_int_distribution<Volume>(1, 10)(rng_);
    emit({t, symbol_, EventKind::Submit, side, next_id_++, price, v});
  }

  void remove_level(TimestampMs t, Side side, Ticks price, double execute_share) {
    for (lob::OrderId id : book_.orders_at(side, price)) {
      const bool exec = std::bernoulli_distribution(execute_share)(rng_);
      emit({t, symbol_, exec ? EventKind::Execute : EventKind::Cancel, side, id, price, book_.resting_volume(id)});
    }
  }

  /// Moves the touch to (bid, ask) and restores the depth behind it.
  void move_touch(TimestampMs t, Ticks bid, Ticks ask, double execute_share) {
    while (book_.best_bid() && *book_.best_bid() > bid) remove_level(t, Side::Bid, *book_.best_bid(), execute_share);
    while (book_.best_ask() && *book_.best_ask() < ask) remove_level(t, Side::Ask, *book_.best_ask(), execute_share);
    if (book_.best_bid() != bid) submit(t, Side::Bid, bid);
    if (book_.best_ask() != ask) submit(t, Side::Ask, ask);
    refill(t, Side::Bid);
    refill(t, Side::Ask);
  }

  void churn(TimestampMs t) {
    const Side side = std::bernoulli_distribution(0.5)(rng_) ? Side::Bid : Side::Ask;
    const double u = std::uniform_real_distribution<double>()(rng_);
    const lob::BookState snap = book_.snapshot(static_cast<std::size_t>(depth_));
    const auto& levels = snap.side(side);
    if (levels.empty()) return;
    if (u < 0.4) {
      const auto k = std::uniform_int_distribution<Ticks>(0, depth_ - 1)(rng_);
      const Ticks best = levels.front().price;
      const Ticks price = side == Side::Bid ? best - k : best + k;
      if (price > 0) submit(t, side, price);
    } else if (u < 0.75) {
      const auto li = std::uniform_int_distribution<std::size_t>(0, levels.size() - 1)(rng_);
      // Never empty the touch: that would move the spread off its latent path.
      if (li == 0 && levels[0].order_count < 2) return;
      const auto ids = book_.orders_at(side, levels[li].price);
      const lob::OrderId id = ids[std::uniform_int_distribution<std::size_t>(0, ids.size() - 1)(rng_)];
      emit({t, symbol_, EventKind::Cancel, side, id, levels[li].price, book_.resting_volume(id)});
    } else {
      const lob::OrderId id = book_.orders_at(side, levels.front().price).front();
      const Volume resting = book_.resting_volume(id);
      if (resting < 2) return;
      const Volume v = std::uniform_int_distribution<Volume>(1, resting - 1)(rng_);
      emit({t, symbol_, EventKind::Execute, side, id, levels.front().price, v});
    }
  }

  std::vector<OrderEvent> take() { return std::move(events_); }

 private:
  void emit(OrderEvent e) {
    book_.apply(e);
    events_.push_back(std::move(e));
  }

  void refill(TimestampMs t, Side side) {
    while (book_.level_count(side) < static_cast<std::size_t>(depth_)) {
      const lob::BookState snap = book_.snapshot();
      const Ticks worst = snap.side(side).back().price;
      const auto gap = std::uniform_int_distribution<Ticks>(1, 3)(rng_);
      const Ticks price = side == Side::Bid ? worst - gap : worst + gap;
      if (price <= 0) break;
      submit(t, side, price);
    }
    while (book_.level_count(side) > static_cast<std::size_t>(2 * depth_)) {
      const lob::BookState snap = book_.snapshot();
      remove_level(t, side, snap.side(side).back().price, 0.0);
    }
  }

  std::string symbol_;
  int depth_;
  Volume lot_;
  std::mt19937_64& rng_;
  lob::OrderBook book_;
  std::vector<OrderEvent> events_;
  lob::OrderId next_id_ = 1;
};

}  // namespace

void SynthSpec::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::InvalidArgument, "synth: " + what); };
  if (n_assets < 1 || days < 1) bad("need at least one asset and one day");
  if (session_ms <= 0 || step_ms <= 0 || step_ms > session_ms) bad("invalid session or step length");
  if (!(base_spread >= 1.0) || max_spread < 1 || !(spread_vol >= 0.0)) bad("invalid spread parameters");
  auto check_size = [&](const std::vector<double>& v, const char* name) {
    if (!v.empty() && v.size() != static_cast<std::size_t>(n_assets)) {
      bad(std::string(name) + " needs one value per asset");
    }
  };
  check_size(loadings, "loadings");
  check_size(half_lives_ms, "half_lives_ms");
  check_size(tail_sigmas, "tail_sigmas");
  for (int i = 0; i < n_assets; ++i) {
    const double l = loading(i);
    if (!(l >= 0.0 && l <= 1.0)) bad("loadings must lie in [0, 1]");
    if (!(half_life_ms(i) > 0.0)) bad("half-life must be positive");
    if (!(tail_sigma(i) >= 0.0)) bad("tail sigma must be non-negative");
  }
  if (!(common_half_life_ms > 0.0) || !(jumps_per_half_life > 0.0)) bad("invalid common factor parameters");
  if (!(half_life_jitter >= 0.0) || !(spike_rate >= 0.0) || !(spike_scale >= 0.0)) bad("invalid spike parameters");
  if (!(event_rate >= 0.0) || !(execute_share >= 0.0 && execute_share <= 1.0) || !(mid_vol >= 0.0)) {
    bad("invalid order-flow parameters");
  }
  if (depth < 1 || lot < 1) bad("depth and lot must be positive");
  if (start_price <= max_spread + 10L * depth) bad("start price too close to zero");
}

double SynthSpec::loading(int asset) const { return pick(loadings, asset, default_loading); }
double SynthSpec::half_life_ms(int asset) const { return pick(half_lives_ms, asset, default_half_life_ms); }
double SynthSpec::tail_sigma(int asset) const { return pick(tail_sigmas, asset, default_tail_sigma); }

std::string SynthSpec::symbol(int asset) const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", asset);
  return symbol_prefix + buf;
}

std::string SynthSpec::day_label(int day) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "d%02d", day + 1);
  return buf;
}

LatentPath simulate_latent(const SynthSpec& spec, int asset, int day) {
  spec.validate();
  if (asset < 0 || asset >= spec.n_assets || day < 0 || day >= spec.days) {
    fail(ErrorCode::OutOfRange, "asset or day index out of range");
  }
  const auto dt = static_cast<double>(spec.step_ms);
  auto common_rng = make_rng(spec.seed, 0, static_cast<std::uint64_t>(day), 0);
  auto rng = make_rng(spec.seed, static_cast<std::uint64_t>(asset) + 1, static_cast<std::uint64_t>(day), 0);
  std::normal_distribution<double> normal;

  LatentPath path;
  path.half_life_ms = spec.half_life_ms(asset) * std::exp(spec.half_life_jitter * normal(rng));
  JumpOu common(spec.common_half_life_ms, spec.jumps_per_half_life, dt, common_rng);
  JumpOu own(path.half_life_ms, spec.jumps_per_half_life, dt, rng);
  const double spike_decay = std::exp(-std::numbers::ln2 * dt / path.half_life_ms);
  const double sigma = spec.tail_sigma(asset);
  const bool spikes = sigma > 0.0 && spec.spike_rate > 0.0 && spec.spike_scale > 0.0;
  const double spike_mean = spec.spike_rate * dt / 1000.0;
  const double l = spec.loading(asset);
  const double own_weight = std::sqrt(std::max(0.0, 1.0 - l * l));
  const double mid_sd = spec.mid_vol * std::sqrt(dt / 1000.0);
  const double log_base = std::log(spec.base_spread);

  double jump = 0.0;
  double mid = static_cast<double>(spec.start_price);
  const auto steps = static_cast<std::size_t>(spec.session_ms / spec.step_ms);
  path.times_ms.reserve(steps);
  path.spread.reserve(steps);
  path.best_bid.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    if (s > 0) {
      common.step(common_rng);
      own.step(rng);
      jump *= spike_decay;
      if (spikes) {
        const int n = std::poisson_distribution<int>(spike_mean)(rng);
        for (int k = 0; k < n; ++k) jump += spec.spike_scale * std::exp(sigma * normal(rng));
      }
      mid += mid_sd * normal(rng);
    }
    const double x = log_base + spec.spread_vol * (l * common.value() + own_weight * own.value()) + jump;
    const auto spread = static_cast<Ticks>(std::clamp(std::round(std::exp(std::min(x, 50.0))), 1.0,
                                                      static_cast<double>(spec.max_spread)));
    const auto bid = static_cast<Ticks>(std::floor(mid - 0.5 * static_cast<double>(spread)));
    path.times_ms.push_back(spec.open_ms + static_cast<TimestampMs>(s) * spec.step_ms);
    path.spread.push_back(spread);
    path.best_bid.push_back(bid);
  }
  return path;
}

std::vector<lob::OrderEvent> generate_events(const SynthSpec& spec, int asset, int day) {
  const LatentPath path = simulate_latent(spec, asset, day);
  auto rng = make_rng(spec.seed, static_cast<std::uint64_t>(asset) + 1, static_cast<std::uint64_t>(day), 1);
  EventWriter writer(spec.symbol(asset), spec.depth, spec.lot, rng);
  const double churn_mean = spec.event_rate * static_cast<double>(spec.step_ms) / 1000.0;
  std::vector<TimestampMs> offsets;
  for (std::size_t s = 0; s < path.times_ms.size(); ++s) {
    const TimestampMs t = path.times_ms[s];
    writer.move_touch(t, path.best_bid[s], path.best_bid[s] + path.spread[s], spec.execute_share);
    if (spec.step_ms < 2) continue;
    const int n = std::poisson_distribution<int>(churn_mean)(rng);
    offsets.clear();
    std::uniform_int_distribution<TimestampMs> offset(1, spec.step_ms - 1);
    for (int k = 0; k < n; ++k) offsets.push_back(offset(rng));
    std::sort(offsets.begin(), offsets.end());
    for (TimestampMs o : offsets) writer.churn(t + o);
  }
  return writer.take();
}

std::vector<GeneratedFile> generate_panel(const SynthSpec& spec, const std::filesystem::path& out_dir,
                                          unsigned workers) {
  spec.validate();
  std::filesystem::create_directories(out_dir);
  const auto total = static_cast<std::size_t>(spec.n_assets) * static_cast<std::size_t>(spec.days);
  std::vector<GeneratedFile> files(total);
  parallel_for(total, workers, [&](std::size_t k) {
    const int asset = static_cast<int>(k % static_cast<std::size_t>(spec.n_assets));
    const int day = static_cast<int>(k / static_cast<std::size_t>(spec.n_assets));
    GeneratedFile& f = files[k];
    f.symbol = spec.symbol(asset);
    f.day = SynthSpec::day_label(day);
    f.path = out_dir / (f.symbol + "_" + f.day + ".csv");
    io::write_events_csv(f.path, generate_events(spec, asset, day));
  });
  return files;
}

}  // namespace lobres::synth
