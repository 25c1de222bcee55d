#pragma once

// Stage orchestration. Every stage reads its inputs from the previous stage's
// artifacts under the output directory, so stages can run one at a time from
// the command line or back to back:
//
//   series/<measure>/<sym>_<day>.csv        sampled measure (time_s,value)
//   ted/<measure>/<sym>_<day>.{csv,json}    exceedance records and thresholds
//   lrp/<measure>/<sym>_<day>.json          threshold fits and LRP points
//   curves/<measure>/<sym>_<day>.json       smoothed LRP curve
//   fpca/<measure>/<day>.json               daily functional PCA
//   fpca/<measure>/regression_<sym>.json    concurrent regression per asset
//   fpca/<measure>/r2_grid.csv              R^2(u) of every asset
//   commonality/<measure>/r2.csv            scalar PCA / ICA regressions
//   summary.json

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/bspline.hpp"
#include "core/config.hpp"
#include "core/error.hpp"

namespace lobres::pipeline {

struct Failure {
  std::string stage;
  std::string symbol;
  std::string day;
  ErrorCode code = ErrorCode::Internal;
  std::string message;
};

struct StageReport {
  std::string stage;
  std::size_t tasks = 0;
  std::size_t cached = 0;
  std::vector<Failure> failures;
};

struct RunReport {
  std::vector<StageReport> stages;
  [[nodiscard]] std::vector<Failure> failures() const;
};

struct AssetDay {
  std::string symbol;
  std::string day;
  std::filesystem::path events;
};

/// Files matching the glob, named <symbol>_<day>.<ext>, sorted by day then
/// symbol.
std::vector<AssetDay> discover_inputs(const std::string& pattern);

StageReport run_synth(const config::PipelineConfig& cfg);
StageReport run_measure(const config::PipelineConfig& cfg);
StageReport run_ted(const config::PipelineConfig& cfg);
StageReport run_lrp(const config::PipelineConfig& cfg);
StageReport run_fpca(const config::PipelineConfig& cfg);
StageReport run_commonality(const config::PipelineConfig& cfg);
StageReport write_summary(const config::PipelineConfig& cfg, const std::vector<Failure>& failures);

/// Generates synthetic events first when the config has a synth section and
/// no input glob, then runs every stage the method set needs.
RunReport run_pipeline(config::PipelineConfig cfg);

/// Output directory of one stage for the configured measure.
std::filesystem::path stage_dir(const config::PipelineConfig& cfg, const std::string& stage);

nlohmann::json curve_to_json(const fda::FunctionalCurve& curve);
fda::FunctionalCurve curve_from_json(const nlohmann::json& j);

/// 64-bit FNV-1a.
std::uint64_t content_hash(std::string_view data, std::uint64_t seed = 14695981039346656037ULL);

}  // namespace lobres::pipeline
