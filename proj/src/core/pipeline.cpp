#include "core/pipeline.hpp"

#include <glob.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "core/commonality.hpp"
#include "core/concurrent.hpp"
#include "core/event_io.hpp"
#include "core/format.hpp"
#include "core/fpca.hpp"
#include "core/ica.hpp"
#include "core/parallel.hpp"
#include "core/sampling.hpp"
#include "core/smoothing.hpp"
#include "core/survival.hpp"
#include "core/svg.hpp"
#include "core/synth.hpp"
#include "core/ted.hpp"

namespace lobres::pipeline {

namespace fs = std::filesystem;
using config::PipelineConfig;
using nlohmann::json;

namespace {

class Collector {
 public:
  explicit Collector(std::string stage) : stage_(std::move(stage)) {}

  template <class Fn>
  bool guarded(const std::string& symbol, const std::string& day, Fn&& fn) {
    try {
      fn();
      return true;
    } catch (const Error& e) {
      add(symbol, day, e.code(), e.what());
    } catch (const fs::filesystem_error& e) {
      add(symbol, day, ErrorCode::Io, e.what());
    } catch (const json::exception& e) {
      add(symbol, day, ErrorCode::Parse, e.what());
    } catch (const std::exception& e) {
      add(symbol, day, ErrorCode::Internal, e.what());
    }
    return false;
  }

  void add(const std::string& symbol, const std::string& day, ErrorCode code, const std::string& message) {
    const std::lock_guard lock(mutex_);
    failures_.push_back({stage_, symbol, day, code, message});
  }

  std::vector<Failure> take() {
    std::sort(failures_.begin(), failures_.end(), [](const Failure& a, const Failure& b) {
      return std::tie(a.day, a.symbol, a.message) < std::tie(b.day, b.symbol, b.message);
    });
    return std::move(failures_);
  }

 private:
  std::string stage_;
  std::mutex mutex_;
  std::vector<Failure> failures_;
};

unsigned workers(const PipelineConfig& cfg) { return config::workers_from_env(cfg.workers); }

std::string measure_name(const PipelineConfig& cfg) { return std::string(liquidity::to_string(cfg.measure.kind)); }

std::string resolved_input(const PipelineConfig& cfg) {
  if (!cfg.input.empty()) return cfg.input;
  if (cfg.synth) return (cfg.synth_dir() / "*.csv").string();
  fail(ErrorCode::Config, "no input glob configured");
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string measure_settings(const PipelineConfig& cfg) {
  std::ostringstream o;
  o << measure_name(cfg) << ';' << fmt::num(cfg.measure.r_cap) << ';' << cfg.measure.max_levels << ';'
    << cfg.measure.currency_mode << ';' << fmt::num(cfg.measure.tick_size) << ';'
    << static_cast<int>(cfg.cross_policy) << ';' << cfg.session.open_ms << ';' << cfg.session.close_ms << ';'
    << cfg.interval_ms;
  return o.str();
}

struct Cache {
  fs::path file;
  std::string key;

  [[nodiscard]] bool hit(const fs::path& artifact) const {
    if (!fs::exists(artifact) || !fs::exists(file)) return false;
    std::ifstream in(file);
    std::string stored;
    std::getline(in, stored);
    return stored == key;
  }
  void store() const { fmt::write_text(file, key + "\n"); }
};

std::vector<lob::OrderEvent> parse_events(const fs::path& path, std::string_view text) {
  const auto ext = path.extension().string();
  return ext == ".ndjson" || ext == ".jsonl" ? io::parse_events_ndjson(text) : io::parse_events_csv(text);
}

fs::path series_path(const PipelineConfig& cfg, const AssetDay& a) {
  return stage_dir(cfg, "series") / (a.symbol + "_" + a.day + ".csv");
}

fs::path ted_path(const PipelineConfig& cfg, const AssetDay& a, const char* ext) {
  return stage_dir(cfg, "ted") / (a.symbol + "_" + a.day + ext);
}

std::string ted_csv(const std::vector<ted::TedRecord>& records) {
  std::string out = "threshold_index,threshold,start_ms,duration_ms";
  for (std::size_t k = 1; k <= liquidity::kCovariateCount; ++k) out += ",x" + std::to_string(k);
  out += '\n';
  for (const auto& r : records) {
    out += std::to_string(r.threshold_index) + ',' + fmt::num(r.threshold) + ',' + std::to_string(r.start_ms) + ',' +
           std::to_string(r.duration_ms);
    for (double x : r.covariates.x) out += ',' + fmt::num(x);
    out += '\n';
  }
  return out;
}

std::vector<ted::TedRecord> parse_ted_csv(std::string_view text) {
  std::vector<ted::TedRecord> out;
  bool header = true;
  for (std::string_view line : fmt::split(text, '\n')) {
    line = fmt::trim(line);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = fmt::split(line, ',');
    if (f.size() != 4 + liquidity::kCovariateCount) fail(ErrorCode::Parse, "bad TED record line");
    ted::TedRecord r;
    r.threshold_index = static_cast<int>(fmt::parse_num(f[0]));
    r.threshold = fmt::parse_num(f[1]);
    r.start_ms = static_cast<lob::TimestampMs>(fmt::parse_num(f[2]));
    r.duration_ms = static_cast<lob::TimestampMs>(fmt::parse_num(f[3]));
    for (std::size_t k = 0; k < liquidity::kCovariateCount; ++k) r.covariates[k] = fmt::parse_num(f[4 + k]);
    out.push_back(r);
  }
  return out;
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json fit_json(const survival::SurvivalFit& f) {
  return {{"threshold_index", f.threshold_index},
          {"beta", vec_json(f.beta)},
          {"std_errors", vec_json(f.std_errors)},
          {"active", f.active},
          {"sigma", f.sigma},
          {"sigma_unbiased", f.sigma_unbiased},
          {"n_obs", f.n_obs},
          {"loglik", f.loglik},
          {"saturated", f.saturated},
          {"x8_fill", f.x8_fill},
          {"warnings", f.warnings}};
}

struct Row {
  std::string day;
  std::string symbol;
  std::string text;
};

void write_rows(const fs::path& path, const std::string& header, std::vector<Row> rows) {
  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return std::tie(a.day, a.symbol, a.text) < std::tie(b.day, b.symbol, b.text); });
  std::string out = header + "\n";
  for (const auto& r : rows) out += r.text + "\n";
  fmt::write_text(path, out);
}

std::vector<std::vector<std::string>> read_csv_rows(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  if (!fs::exists(path)) return rows;
  const std::string text = io::read_file(path);
  bool header = true;
  for (std::string_view line : fmt::split(text, '\n')) {
    line = fmt::trim(line);
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    for (auto c : fmt::split(line, ',')) cells.emplace_back(fmt::trim(c));
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace

std::vector<Failure> RunReport::failures() const {
  std::vector<Failure> out;
  for (const auto& s : stages) out.insert(out.end(), s.failures.begin(), s.failures.end());
  return out;
}

std::uint64_t content_hash(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

fs::path stage_dir(const PipelineConfig& cfg, const std::string& stage) {
  return cfg.output_dir / stage / measure_name(cfg);
}

std::vector<AssetDay> discover_inputs(const std::string& pattern) {
  glob_t g{};
  const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
  std::vector<AssetDay> out;
  if (rc != 0 && rc != GLOB_NOMATCH) {
    globfree(&g);
    fail(ErrorCode::Io, "glob failed for '" + pattern + "'");
  }
  for (std::size_t i = 0; i < g.gl_pathc; ++i) {
    const fs::path p = g.gl_pathv[i];
    if (!fs::is_regular_file(p)) continue;
    const std::string stem = p.stem().string();
    const auto cut = stem.rfind('_');
    if (cut == std::string::npos || cut == 0 || cut + 1 == stem.size()) {
      globfree(&g);
      fail(ErrorCode::Config, "cannot read <symbol>_<day> from file name " + p.filename().string());
    }
    out.push_back({stem.substr(0, cut), stem.substr(cut + 1), p});
  }
  globfree(&g);
  std::sort(out.begin(), out.end(),
            [](const AssetDay& a, const AssetDay& b) { return std::tie(a.day, a.symbol) < std::tie(b.day, b.symbol); });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].day == out[i - 1].day && out[i].symbol == out[i - 1].symbol) {
      fail(ErrorCode::Config, "duplicate input for " + out[i].symbol + " on " + out[i].day);
    }
  }
  return out;
}

json curve_to_json(const fda::FunctionalCurve& c) {
  return {{"basis",
           {{"order", c.basis.order()},
            {"range", {c.basis.lo(), c.basis.hi()}},
            {"knots", c.basis.interior_knots()}}},
          {"coefficients", vec_json(c.coefficients)},
          {"metadata", {{"asset", c.metadata.asset}, {"day", c.metadata.day}, {"measure", c.metadata.measure}}}};
}

fda::FunctionalCurve curve_from_json(const json& j) {
  const auto& b = j.at("basis");
  fda::BsplineBasis basis(b.at("order").get<int>(), b.at("range").at(0).get<double>(),
                          b.at("range").at(1).get<double>(), b.at("knots").get<std::vector<double>>());
  const auto coef = j.at("coefficients").get<std::vector<double>>();
  fda::CurveMetadata meta;
  if (j.contains("metadata")) {
    const auto& m = j.at("metadata");
    meta.asset = m.value("asset", "");
    meta.day = m.value("day", "");
    meta.measure = m.value("measure", "");
  }
  return {basis, Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size())),
          std::move(meta)};
}

StageReport run_synth(const PipelineConfig& cfg) {
  if (!cfg.synth) fail(ErrorCode::Config, "config has no [synth] section");
  StageReport report{"synth", static_cast<std::size_t>(cfg.synth->n_assets * cfg.synth->days), 0, {}};
  synth::generate_panel(*cfg.synth, cfg.synth_dir(), workers(cfg));
  return report;
}

StageReport run_measure(const PipelineConfig& cfg) {
  const auto inputs = discover_inputs(resolved_input(cfg));
  Collector errors("measure");
  std::vector<char> cached(inputs.size(), 0);
  const std::string settings = measure_settings(cfg);
  parallel_for(inputs.size(), workers(cfg), [&](std::size_t i) {
    const AssetDay& a = inputs[i];
    errors.guarded(a.symbol, a.day, [&] {
      const std::string text = io::read_file(a.events);
      const Cache cache{cfg.output_dir / ".cache" / "measure" / measure_name(cfg) / (a.symbol + "_" + a.day + ".key"),
                        hex(content_hash(text, content_hash(settings)))};
      const fs::path out = series_path(cfg, a);
      if (cfg.cache && cache.hit(out)) {
        cached[i] = 1;
        return;
      }
      const auto events = parse_events(a.events, text);
      const auto series = lob::sample_series(events, cfg.measure, cfg.session, cfg.interval_ms, cfg.cross_policy);
      fs::create_directories(out.parent_path());
      lob::write_series_csv(out, series);
      cache.store();
    });
  });
  return {"measure", inputs.size(), static_cast<std::size_t>(std::count(cached.begin(), cached.end(), 1)),
          errors.take()};
}

StageReport run_ted(const PipelineConfig& cfg) {
  const auto inputs = discover_inputs(resolved_input(cfg));
  Collector errors("ted");
  std::vector<char> cached(inputs.size(), 0);
  const std::string settings = measure_settings(cfg) + ";" + cfg.thresholds;
  parallel_for(inputs.size(), workers(cfg), [&](std::size_t i) {
    const AssetDay& a = inputs[i];
    errors.guarded(a.symbol, a.day, [&] {
      const fs::path spath = series_path(cfg, a);
      if (!fs::exists(spath)) fail(ErrorCode::Io, "no sampled series; run the measure stage first");
      const std::string series_text = io::read_file(spath);
      const std::string text = io::read_file(a.events);
      const Cache cache{cfg.output_dir / ".cache" / "ted" / measure_name(cfg) / (a.symbol + "_" + a.day + ".key"),
                        hex(content_hash(text, content_hash(series_text, content_hash(settings))))};
      const fs::path csv = ted_path(cfg, a, ".csv");
      const fs::path meta = ted_path(cfg, a, ".json");
      if (cfg.cache && cache.hit(csv) && fs::exists(meta)) {
        cached[i] = 1;
        return;
      }
      const auto series = lob::parse_series_csv(series_text);
      const auto thresholds = ted::decile_thresholds(series.values);
      const auto events = parse_events(a.events, text);
      const auto records =
          ted::collect_ted_records(events, cfg.measure, cfg.session, thresholds.values, cfg.cross_policy);
      std::vector<int> counts(ted::kThresholdCount, 0);
      for (const auto& r : records) ++counts[static_cast<std::size_t>(r.threshold_index - 1)];
      const json j = {{"symbol", a.symbol},
                      {"day", a.day},
                      {"measure", measure_name(cfg)},
                      {"thresholds", std::vector<double>(thresholds.values.begin(), thresholds.values.end())},
                      {"collapsed", thresholds.collapsed},
                      {"counts", counts}};
      fmt::write_text(csv, ted_csv(records));
      fmt::write_text(meta, j.dump(2) + "\n");
      cache.store();
    });
  });
  return {"ted", inputs.size(), static_cast<std::size_t>(std::count(cached.begin(), cached.end(), 1)), errors.take()};
}

StageReport run_lrp(const PipelineConfig& cfg) {
  const auto inputs = discover_inputs(resolved_input(cfg));
  Collector errors("lrp");
  const fda::BsplineBasis basis = fda::default_lrp_basis();
  parallel_for(inputs.size(), workers(cfg), [&](std::size_t i) {
    const AssetDay& a = inputs[i];
    errors.guarded(a.symbol, a.day, [&] {
      const fs::path meta_path = ted_path(cfg, a, ".json");
      if (!fs::exists(meta_path)) fail(ErrorCode::Io, "no exceedance records; run the ted stage first");
      const json meta = json::parse(io::read_file(meta_path));
      const auto thresholds = meta.at("thresholds").get<std::vector<double>>();
      const auto records = parse_ted_csv(io::read_file(ted_path(cfg, a, ".csv")));

      std::vector<survival::SurvivalFit> fits;
      std::vector<liquidity::CovariateVector> refs;
      for (int j = 1; j <= static_cast<int>(ted::kThresholdCount); ++j) {
        std::vector<ted::TedRecord> group;
        for (const auto& r : records) {
          if (r.threshold_index == j) group.push_back(r);
        }
        try {
          survival::SurvivalFit fit = survival::fit_lognormal_aft(group);
          fit.threshold_index = j;
          refs.push_back(survival::median_covariates(group, fit.x8_fill));
          fits.push_back(std::move(fit));
        } catch (const Error& e) {
          fail(e.code(), "threshold " + std::to_string(j) + ": " + e.what());
        }
      }
      const auto points = survival::lrp_points(fits, thresholds, refs);
      std::vector<double> u;
      for (std::size_t j = 0; j < ted::kThresholdCount; ++j) u.push_back(survival::LrpPoints::domain_point(j));
      const std::vector<double> y(points.values.begin(), points.values.end());
      double lambda = cfg.lambda;
      if (cfg.gcv) lambda = fda::gcv(u, y, basis, fda::default_lambda_grid(cfg.gcv_grid)).best_lambda;
      const auto curve = fda::smooth(points, basis, lambda, {a.symbol, a.day, measure_name(cfg)});

      json fits_json = json::array();
      for (const auto& f : fits) fits_json.push_back(fit_json(f));
      json refs_json = json::array();
      for (const auto& r : refs) refs_json.push_back(std::vector<double>(r.x.begin(), r.x.end()));
      const json lrp = {{"symbol", a.symbol},
                        {"day", a.day},
                        {"measure", measure_name(cfg)},
                        {"lambda", lambda},
                        {"u", u},
                        {"thresholds", thresholds},
                        {"values", y},
                        {"references", refs_json},
                        {"fits", fits_json}};
      const std::string name = a.symbol + "_" + a.day + ".json";
      fmt::write_text(stage_dir(cfg, "lrp") / name, lrp.dump(2) + "\n");
      fmt::write_text(stage_dir(cfg, "curves") / name, curve_to_json(curve).dump(2) + "\n");
    });
  });
  return {"lrp", inputs.size(), 0, errors.take()};
}

StageReport run_fpca(const PipelineConfig& cfg) {
  Collector errors("fpca");
  const fs::path curves_dir = stage_dir(cfg, "curves");
  const fs::path out_dir = stage_dir(cfg, "fpca");
  std::map<std::string, std::map<std::string, fda::FunctionalCurve>> by_day;  // day -> symbol -> curve
  if (fs::exists(curves_dir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(curves_dir)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      errors.guarded(f.stem().string(), "", [&] {
        auto c = curve_from_json(json::parse(io::read_file(f)));
        by_day[c.metadata.day].emplace(c.metadata.asset, std::move(c));
      });
    }
  }
  if (by_day.empty()) {
    errors.add("", "", ErrorCode::InsufficientCurves, "no LRP curves found; run the lrp stage first");
    return {"fpca", 0, 0, errors.take()};
  }

  std::vector<std::string> days;
  for (const auto& [d, _] : by_day) days.push_back(d);
  std::vector<std::optional<fda::FpcaResult>> results(days.size());
  auto curves_of = [&](const std::string& day, const std::string& exclude) {
    std::vector<fda::FunctionalCurve> out;
    for (const auto& [sym, c] : by_day.at(day)) {
      if (sym != exclude) out.push_back(c);
    }
    return out;
  };

  parallel_for(days.size(), workers(cfg), [&](std::size_t k) {
    errors.guarded("", days[k], [&] {
      const auto curves = curves_of(days[k], "");
      fda::FpcaResult r = fda::fpca(curves, cfg.q);
      json ef = json::array();
      for (const auto& e : r.eigenfunctions) ef.push_back(curve_to_json(e));
      json scores = json::object();
      for (Eigen::Index i = 0; i < r.scores.rows(); ++i) {
        scores[r.labels[static_cast<std::size_t>(i)]] = vec_json(r.scores.row(i).transpose());
      }
      const json j = {{"day", days[k]},
                      {"measure", measure_name(cfg)},
                      {"labels", r.labels},
                      {"eigenvalues", r.eigenvalues},
                      {"all_eigenvalues", r.all_eigenvalues},
                      {"degenerate", r.degenerate},
                      {"warnings", r.warnings},
                      {"mean", curve_to_json(r.mean)},
                      {"eigenfunctions", ef},
                      {"scores", scores}};
      fmt::write_text(out_dir / (days[k] + ".json"), j.dump(2) + "\n");
      if (cfg.plots) {
        const auto grid = fda::linspace(r.mean.basis.lo(), r.mean.basis.hi(), 81);
        svg::Chart eig{"Eigenfunctions " + days[k], "threshold decile", "xi(u)", {}, false, 640, 400};
        for (const auto& e : r.eigenfunctions) {
          const Eigen::VectorXd v = e.evaluate(grid);
          eig.lines.push_back({e.metadata.asset, grid, std::vector<double>(v.data(), v.data() + v.size())});
        }
        fmt::write_text(out_dir / ("eigen_" + days[k] + ".svg"), svg::render(eig));
        svg::Chart lrp{"LRP curves " + days[k], "threshold decile", "E log TED", {}, false, 640, 400};
        for (const auto& c : curves) {
          const Eigen::VectorXd v = c.evaluate(grid);
          lrp.lines.push_back({c.metadata.asset, grid, std::vector<double>(v.data(), v.data() + v.size())});
        }
        fmt::write_text(out_dir / ("lrp_" + days[k] + ".svg"), svg::render(lrp));
      }
      results[k] = std::move(r);
    });
  });

  if (!cfg.wants("fpca-regression")) return {"fpca", days.size(), 0, errors.take()};

  std::set<std::string> symbols;
  for (const auto& [d, m] : by_day) {
    for (const auto& [s, _] : m) symbols.insert(s);
  }
  const std::vector<std::string> syms(symbols.begin(), symbols.end());
  std::vector<std::vector<Row>> rows(syms.size());
  std::vector<std::optional<fda::ConcurrentFit>> fits(syms.size());
  parallel_for(syms.size(), workers(cfg), [&](std::size_t s) {
    const std::string& sym = syms[s];
    errors.guarded(sym, "", [&] {
      std::vector<fda::FunctionalCurve> responses;
      std::vector<std::vector<fda::FunctionalCurve>> covariates;
      std::vector<std::string> used_days;
      for (std::size_t k = 0; k < days.size(); ++k) {
        const auto& day_curves = by_day.at(days[k]);
        const auto it = day_curves.find(sym);
        if (it == day_curves.end()) continue;
        if (cfg.leave_one_out) {
          const auto others = curves_of(days[k], sym);
          if (others.size() < static_cast<std::size_t>(cfg.q) + 1) continue;
          covariates.push_back(fda::fpca(others, cfg.q).eigenfunctions);
        } else {
          if (!results[k]) continue;
          covariates.push_back(results[k]->eigenfunctions);
        }
        responses.push_back(it->second);
        used_days.push_back(days[k]);
      }
      fda::ConcurrentOptions opt;
      opt.lambda = cfg.lambda_beta;
      opt.grid_points = cfg.grid_points;
      fda::ConcurrentFit fit = fda::concurrent_regress(responses, covariates, opt);
      json betas = json::array();
      for (const auto& b : fit.betas) betas.push_back(curve_to_json(b));
      const json j = {{"symbol", sym},
                      {"measure", measure_name(cfg)},
                      {"days", used_days},
                      {"lambda", fit.lambda},
                      {"intercept", fit.intercept ? json(*fit.intercept) : json(nullptr)},
                      {"betas", betas},
                      {"grid", fit.grid},
                      {"r2", fit.r2},
                      {"r2_standard", fit.r2_standard},
                      {"ss_reg", fit.ss_reg},
                      {"ss_res", fit.ss_res},
                      {"mean_r2", fit.mean_r2(fit.grid.front(), fit.grid.back())},
                      {"leave_one_out", cfg.leave_one_out},
                      {"warnings", fit.warnings}};
      fmt::write_text(out_dir / ("regression_" + sym + ".json"), j.dump(2) + "\n");
      for (std::size_t g = 0; g < fit.grid.size(); ++g) {
        rows[s].push_back({"", sym,
                           sym + "," + fmt::num(fit.grid[g]) + "," + fmt::num(fit.r2[g]) + "," +
                               fmt::num(fit.r2_standard[g]) + "," + fmt::num(fit.ss_reg[g]) + "," +
                               fmt::num(fit.ss_res[g])});
      }
      fits[s] = std::move(fit);
    });
  });
  std::string grid_csv = "symbol,u,r2,r2_standard,ss_reg,ss_res\n";
  for (const auto& r : rows) {
    for (const auto& row : r) grid_csv += row.text + "\n";
  }
  fmt::write_text(out_dir / "r2_grid.csv", grid_csv);
  if (cfg.plots) {
    svg::Chart chart{"R2(u) of the concurrent regression", "threshold decile", "R2(u)", {}, false, 640, 400};
    for (std::size_t s = 0; s < syms.size(); ++s) {
      if (fits[s]) chart.lines.push_back({syms[s], fits[s]->grid, fits[s]->r2});
    }
    fmt::write_text(out_dir / "r2.svg", svg::render(chart));
  }
  return {"fpca", days.size() + syms.size(), 0, errors.take()};
}

StageReport run_commonality(const PipelineConfig& cfg) {
  const auto inputs = discover_inputs(resolved_input(cfg));
  Collector errors("commonality");
  std::map<std::string, std::vector<AssetDay>> by_day;
  for (const auto& a : inputs) by_day[a.day].push_back(a);
  std::vector<std::string> days;
  for (const auto& [d, _] : by_day) days.push_back(d);
  std::vector<std::vector<Row>> rows(days.size());
  std::vector<std::string> methods;
  if (cfg.wants("pca")) methods.emplace_back("pca");
  if (cfg.wants("ica")) methods.emplace_back("ica");

  parallel_for(days.size(), workers(cfg), [&](std::size_t k) {
    const std::string& day = days[k];
    std::vector<lob::LiquiditySeries> series;
    std::vector<std::string> labels;
    for (const auto& a : by_day.at(day)) {
      errors.guarded(a.symbol, day, [&] {
        const fs::path p = series_path(cfg, a);
        if (!fs::exists(p)) fail(ErrorCode::Io, "no sampled series; run the measure stage first");
        series.push_back(lob::read_series_csv(p));
        labels.push_back(a.symbol);
      });
    }
    errors.guarded("", day, [&] {
      const auto cs = commonality::make_cross_section(series, labels, cfg.differences);
      for (const auto& m : methods) {
        commonality::Factors factors;
        if (m == "pca") {
          factors = commonality::pca_factors(cs, cfg.q);
        } else {
          commonality::IcaOptions opt;
          opt.components = cfg.q;
          opt.seed = cfg.ica_seed;
          factors = commonality::ica_factors(cs, opt);
        }
        const auto reg = commonality::factor_regression(cs, factors);
        for (Eigen::Index j = 0; j < cs.assets(); ++j) {
          std::string line = day + "," + cs.labels[static_cast<std::size_t>(j)] + "," + m + "," +
                             fmt::num(reg.r2[static_cast<std::size_t>(j)]);
          for (Eigen::Index f = 0; f < factors.loadings.cols(); ++f) line += "," + fmt::num(factors.loadings(j, f));
          rows[k].push_back({day, cs.labels[static_cast<std::size_t>(j)], std::move(line)});
        }
      }
    });
  });
  std::vector<Row> all;
  for (auto& r : rows) std::move(r.begin(), r.end(), std::back_inserter(all));
  std::string header = "day,symbol,method,r2";
  for (int f = 1; f <= cfg.q; ++f) header += ",loading" + std::to_string(f);
  const fs::path out_dir = stage_dir(cfg, "commonality");
  if (cfg.plots) {
    for (const auto& m : methods) {
      std::map<std::string, svg::Line> lines;
      for (const auto& row : all) {
        const auto cells = fmt::split(row.text, ',');
        if (cells[2] != m) continue;
        auto& l = lines[row.symbol];
        l.label = row.symbol;
        const auto d = static_cast<double>(std::find(days.begin(), days.end(), row.day) - days.begin()) + 1.0;
        l.x.push_back(d);
        l.y.push_back(fmt::parse_num(cells[3]));
      }
      svg::Chart chart{"Scalar " + m + " R2 by day", "day", "R2", {}, true, 640, 400};
      for (auto& [_, l] : lines) chart.lines.push_back(std::move(l));
      fmt::write_text(out_dir / ("r2_" + m + ".svg"), svg::render(chart));
    }
  }
  write_rows(out_dir / "r2.csv", header, std::move(all));
  return {"commonality", days.size(), 0, errors.take()};
}

StageReport write_summary(const PipelineConfig& cfg, const std::vector<Failure>& failures) {
  Collector errors("summary");
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
    void add(double v) {
      if (std::isfinite(v)) {
        sum += v;
        ++n;
      }
    }
    [[nodiscard]] double mean() const { return n == 0 ? NAN : sum / static_cast<double>(n); }
    [[nodiscard]] json value() const { return n == 0 ? json(nullptr) : json(mean()); }
  };
  struct AssetStats {
    Acc pca, ica, fpca, fpca_low, fpca_high;
  };
  std::map<std::string, AssetStats> assets;
  for (const auto& r : read_csv_rows(stage_dir(cfg, "commonality") / "r2.csv")) {
    if (r.size() < 4) continue;
    auto& a = assets[r[1]];
    (r[2] == "pca" ? a.pca : a.ica).add(fmt::parse_num(r[3]));
  }
  for (const auto& r : read_csv_rows(stage_dir(cfg, "fpca") / "r2_grid.csv")) {
    if (r.size() < 3) continue;
    auto& a = assets[r[0]];
    const double u = fmt::parse_num(r[1]);
    const double v = fmt::parse_num(r[2]);
    a.fpca.add(v);
    if (u <= 3.0) a.fpca_low.add(v);
    if (u >= 7.0) a.fpca_high.add(v);
  }

  std::map<std::string, std::pair<std::string, std::string>> meta;  // symbol -> (country, sector)
  if (!cfg.metadata.empty()) {
    errors.guarded("", "", [&] {
      const std::string text = io::read_file(cfg.metadata);
      for (std::string_view line : fmt::split(text, '\n')) {
        line = fmt::trim(line);
        if (line.empty()) continue;
        const auto f = fmt::split(line, ',');
        if (f.size() < 3) fail(ErrorCode::Parse, "metadata rows need symbol,country,sector");
        const std::string sym(fmt::trim(f[0]));
        if (sym == "symbol") continue;
        meta[sym] = {std::string(fmt::trim(f[1])), std::string(fmt::trim(f[2]))};
      }
    });
  }

  auto stats_json = [](const AssetStats& s) {
    return json{{"pca_r2", s.pca.value()},
                {"ica_r2", s.ica.value()},
                {"fpca_r2_mean", s.fpca.value()},
                {"fpca_r2_low", s.fpca_low.value()},
                {"fpca_r2_high", s.fpca_high.value()}};
  };
  json assets_json = json::object();
  std::map<std::string, std::map<std::string, AssetStats>> groups;  // dimension -> group -> pooled
  std::map<std::string, std::map<std::string, std::size_t>> group_sizes;
  for (const auto& [sym, s] : assets) {
    json j = stats_json(s);
    const auto it = meta.find(sym);
    if (it != meta.end()) {
      j["country"] = it->second.first;
      j["sector"] = it->second.second;
      for (const auto& [dim, key] : {std::pair{std::string("country"), it->second.first},
                                     std::pair{std::string("sector"), it->second.second}}) {
        auto& g = groups[dim][key];
        ++group_sizes[dim][key];
        g.pca.add(s.pca.mean());
        g.ica.add(s.ica.mean());
        g.fpca.add(s.fpca.mean());
        g.fpca_low.add(s.fpca_low.mean());
        g.fpca_high.add(s.fpca_high.mean());
      }
    }
    assets_json[sym] = std::move(j);
  }
  json groups_json = json::object();
  for (const auto& [dim, m] : groups) {
    for (const auto& [key, s] : m) {
      json j = stats_json(s);
      j["assets"] = group_sizes[dim][key];
      groups_json[dim][key] = std::move(j);
    }
  }

  std::vector<Failure> all = failures;
  for (auto& f : errors.take()) all.push_back(std::move(f));
  json failures_json = json::array();
  for (const auto& f : all) {
    failures_json.push_back({{"stage", f.stage},
                             {"symbol", f.symbol},
                             {"day", f.day},
                             {"code", std::string(to_string(f.code))},
                             {"message", f.message}});
  }
  const json summary = {{"measure", measure_name(cfg)},
                        {"methods", std::vector<std::string>(cfg.methods.begin(), cfg.methods.end())},
                        {"assets", assets_json},
                        {"groups", groups_json},
                        {"failures", failures_json}};
  fmt::write_text(cfg.output_dir / "summary.json", summary.dump(2) + "\n");
  return {"summary", 1, 0, {}};
}

RunReport run_pipeline(PipelineConfig cfg) {
  cfg.validate();
  RunReport report;
  if (cfg.synth && cfg.input.empty()) {
    report.stages.push_back(run_synth(cfg));
    cfg.input = (cfg.synth_dir() / "*.csv").string();
  }
  if (discover_inputs(resolved_input(cfg)).empty()) {
    fail(ErrorCode::Io, "no input files match '" + resolved_input(cfg) + "'");
  }
  report.stages.push_back(run_measure(cfg));
  if (cfg.wants("fpca-regression")) {
    report.stages.push_back(run_ted(cfg));
    report.stages.push_back(run_lrp(cfg));
    report.stages.push_back(run_fpca(cfg));
  }
  if (cfg.wants("pca") || cfg.wants("ica")) report.stages.push_back(run_commonality(cfg));
  report.stages.push_back(write_summary(cfg, report.failures()));
  return report;
}

}  // namespace lobres::pipeline
