#pragma once

// Pipeline configuration: a flat key = value file where [section] headers
// prefix the following keys ("[measure]" then "kind = xlm" sets measure.kind).

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "core/liquidity.hpp"
#include "core/sampling.hpp"
#include "core/synth.hpp"

namespace lobres::config {

class KeyValues {
 public:
  static KeyValues parse(std::string_view text);
  static KeyValues load(const std::filesystem::path& path);

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] std::optional<std::string> get(const std::string& key) const;
  [[nodiscard]] const std::map<std::string, std::string>& entries() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

enum class Stage : int { Measure = 0, Ted, Lrp, Fpca, Commonality, Summary };

struct PipelineConfig {
  std::string input;                 // glob of event files named <symbol>_<day>.csv
  std::filesystem::path output_dir = "out";
  std::filesystem::path metadata;    // optional CSV: symbol,country,sector
  std::filesystem::path events_dir;  // synthetic event files; empty means <output>/events

  liquidity::MeasureSpec measure;
  lob::SessionWindow session;
  lob::TimestampMs interval_ms = 1000;
  lob::CrossPolicy cross_policy = lob::CrossPolicy::Reject;
  std::string thresholds = "deciles";

  double lambda = 0.02;
  bool gcv = false;                  // choose lambda per curve by GCV instead
  std::size_t gcv_grid = 41;

  int q = 3;
  double lambda_beta = 1e-2;
  std::size_t grid_points = 101;
  bool leave_one_out = false;

  std::set<std::string> methods = {"pca", "ica", "fpca-regression"};
  bool differences = false;
  std::uint64_t ica_seed = 1;

  bool plots = false;
  bool cache = true;
  unsigned workers = 1;

  std::optional<synth::SynthSpec> synth;

  /// Unknown keys and malformed values throw ErrorCode::Config.
  static PipelineConfig from(const KeyValues& kv);
  static PipelineConfig load(const std::filesystem::path& path);
  void validate() const;

  [[nodiscard]] std::filesystem::path synth_dir() const {
    return events_dir.empty() ? output_dir / "events" : events_dir;
  }
  [[nodiscard]] bool wants(std::string_view method) const { return methods.count(std::string(method)) != 0; }
  /// Canonical key = value text of every setting that affects outputs.
  [[nodiscard]] std::string canonical() const;
};

bool is_known_key(const std::string& key);

/// LOBRES_WORKERS when set and positive, otherwise `fallback`.
unsigned workers_from_env(unsigned fallback);

/// "HH:MM[:SS[.mmm]]" or a plain millisecond count.
lob::TimestampMs parse_clock(std::string_view s);
std::string format_clock(lob::TimestampMs ms);

bool parse_bool(std::string_view s);
std::vector<double> parse_list(std::string_view s);

}  // namespace lobres::config
