// Command-line front end. Talks to the library only through the C interface.

#include <cstdio>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lobres/lobres.h"

namespace {

struct Failure : std::runtime_error {
  lobres_status status;
  Failure(lobres_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(lobres_status s, const std::string& context) {
  if (s != LOBRES_OK) {
    throw Failure(s, context + ": " + lobres_status_name(s) + ": " + lobres_last_error());
  }
}

struct ConfigDeleter {
  void operator()(lobres_config* c) const { lobres_config_destroy(c); }
};
struct ReportDeleter {
  void operator()(lobres_report* r) const { lobres_report_destroy(r); }
};
struct BookDeleter {
  void operator()(lobres_book* b) const { lobres_book_destroy(b); }
};
using ConfigPtr = std::unique_ptr<lobres_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<lobres_report, ReportDeleter>;
using BookPtr = std::unique_ptr<lobres_book, BookDeleter>;

/// Options shared by the pipeline subcommands, mapped onto config keys.
struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string input;
  std::string output;
  std::string measure;
  double xlm_cap = 0.0;
  int workers = 0;
  bool plots = false;
  bool strict = false;
  std::map<std::string, std::string> extra;  // filled by subcommand flags
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config_path, "Pipeline config file")->check(CLI::ExistingFile);
  sub->add_option("--set", c.sets, "Override a config key (key=value), repeatable");
  sub->add_option("-i,--input", c.input, "Glob of event files <symbol>_<day>.csv");
  sub->add_option("-o,--output", c.output, "Output directory");
  sub->add_option("--measure", c.measure, "Liquidity measure")->check(CLI::IsMember({"spread", "xlm"}));
  sub->add_option("--xlm-cap", c.xlm_cap, "Round-trip size cap R for XLM")->check(CLI::PositiveNumber);
  sub->add_option("--workers", c.workers, "Worker threads (overrides LOBRES_WORKERS)")->check(CLI::PositiveNumber);
  sub->add_flag("--plots", c.plots, "Also write SVG charts");
  sub->add_flag("--strict", c.strict, "Exit with status 3 when any asset or day failed");
}

ConfigPtr build_config(const Common& c) {
  lobres_config* raw = nullptr;
  if (c.config_path.empty()) {
    check(lobres_config_create(&raw), "config");
  } else {
    check(lobres_config_load(c.config_path.c_str(), &raw), "loading " + c.config_path);
  }
  ConfigPtr cfg(raw);
  auto set = [&](const std::string& k, const std::string& v) { check(lobres_config_set(cfg.get(), k.c_str(), v.c_str()), k); };
  if (!c.input.empty()) set("input", c.input);
  if (!c.output.empty()) set("output", c.output);
  if (!c.measure.empty()) set("measure.kind", c.measure);
  if (c.xlm_cap > 0.0) set("measure.r_cap", std::to_string(c.xlm_cap));
  if (c.workers > 0) set("workers", std::to_string(c.workers));
  if (c.plots) set("plots", "true");
  for (const auto& [k, v] : c.extra) set(k, v);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure(LOBRES_CONFIG, "--set expects key=value, got '" + kv + "'");
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  check(lobres_config_validate(cfg.get()), "config");
  return cfg;
}

int run_stage(const Common& c, lobres_stage stage) {
  const ConfigPtr cfg = build_config(c);
  lobres_report* raw = nullptr;
  check(lobres_run_stage(cfg.get(), stage, &raw), "run");
  const ReportPtr report(raw);
  for (std::size_t i = 0; i < lobres_report_stage_count(report.get()); ++i) {
    const char* name = nullptr;
    std::size_t tasks = 0;
    std::size_t cached = 0;
    std::size_t failed = 0;
    check(lobres_report_stage(report.get(), i, &name, &tasks, &cached, &failed), "report");
    std::printf("%-12s tasks %zu  cached %zu  failed %zu\n", name, tasks, cached, failed);
  }
  const std::size_t failures = lobres_report_failure_count(report.get());
  for (std::size_t i = 0; i < failures; ++i) {
    const char* stage_name = nullptr;
    const char* symbol = nullptr;
    const char* day = nullptr;
    const char* message = nullptr;
    lobres_status code = LOBRES_OK;
    check(lobres_report_failure(report.get(), i, &stage_name, &symbol, &day, &code, &message), "report");
    std::fprintf(stderr, "%s [%s %s] %s: %s\n", stage_name, symbol, day, lobres_status_name(code), message);
  }
  return c.strict && failures > 0 ? 3 : 0;
}

int reconstruct(const std::string& path, const std::string& at, int levels, bool automatch) {
  int64_t until = -1;
  if (!at.empty()) check(lobres_parse_time(at.c_str(), &until), "--at");
  lobres_book* raw = nullptr;
  check(lobres_book_replay_file(path.c_str(), automatch ? 1 : 0, until, &raw), "replaying " + path);
  const BookPtr book(raw);
  std::vector<lobres_level> bids(static_cast<std::size_t>(levels));
  std::vector<lobres_level> asks(static_cast<std::size_t>(levels));
  std::size_t nb = 0;
  std::size_t na = 0;
  check(lobres_book_levels(book.get(), LOBRES_BID, bids.data(), bids.size(), &nb), "bids");
  check(lobres_book_levels(book.get(), LOBRES_ASK, asks.data(), asks.size(), &na), "asks");
  std::printf("%10s %8s %6s | %-10s %8s %6s\n", "bid", "volume", "orders", "ask", "volume", "orders");
  for (std::size_t i = 0; i < bids.size() && (i < nb || i < na); ++i) {
    if (i < nb) {
      std::printf("%10lld %8lld %6lld | ", static_cast<long long>(bids[i].price_ticks),
                  static_cast<long long>(bids[i].volume), static_cast<long long>(bids[i].order_count));
    } else {
      std::printf("%10s %8s %6s | ", "", "", "");
    }
    if (i < na) {
      std::printf("%-10lld %8lld %6lld", static_cast<long long>(asks[i].price_ticks),
                  static_cast<long long>(asks[i].volume), static_cast<long long>(asks[i].order_count));
    }
    std::printf("\n");
  }
  std::printf("levels: %zu bid, %zu ask\n", nb, na);
  double spread = 0.0;
  double xlm = 0.0;
  if (lobres_book_measure(book.get(), LOBRES_SPREAD, 0.0, &spread) == LOBRES_OK) {
    std::printf("spread: %g ticks\n", spread);
  } else {
    std::printf("spread: NA (%s)\n", lobres_last_error());
  }
  if (lobres_book_measure(book.get(), LOBRES_XLM, 25000.0, &xlm) == LOBRES_OK) {
    std::printf("xlm(R<=25000): %g ticks\n", xlm);
  } else {
    std::printf("xlm(R<=25000): NA (%s)\n", lobres_last_error());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Liquidity resilience and commonality from limit order book events"};
  app.set_version_flag("--version", std::string(lobres_version()));
  app.require_subcommand(1);

  Common common;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic event panel from the [synth] section");
  add_common(synth, common);
  synth->add_option("--out", synth_out, "Directory for the generated event files");

  std::string events;
  std::string at;
  int levels = 5;
  bool automatch = false;
  auto* recon = app.add_subcommand("reconstruct", "Replay one event file and print the book");
  recon->add_option("events", events, "Event file (CSV or NDJSON)")->required()->check(CLI::ExistingFile);
  recon->add_option("--at", at, "Replay up to this time (HH:MM:SS or ms)");
  recon->add_option("--levels", levels, "Levels to print per side")->check(CLI::PositiveNumber);
  recon->add_flag("--automatch", automatch, "Match crossing submissions instead of rejecting them");

  auto* measure = app.add_subcommand("measure", "Sample the liquidity measure of every asset-day");
  add_common(measure, common);

  auto* ted = app.add_subcommand("ted", "Extract threshold exceedance durations");
  add_common(ted, common);

  double lambda = -1.0;
  int gcv_grid = 0;
  auto* lrp = app.add_subcommand("lrp", "Fit duration models and smooth resilience profiles");
  add_common(lrp, common);
  lrp->add_option("--lambda", lambda, "Smoothing parameter")->check(CLI::NonNegativeNumber);
  lrp->add_option("--gcv-grid", gcv_grid, "Choose lambda by GCV over this many log-spaced values");

  bool loo = false;
  double lambda_beta = -1.0;
  auto* fpca = app.add_subcommand("fpca", "Daily functional PCA and concurrent regressions");
  add_common(fpca, common);
  fpca->add_flag("--loo", loo, "Exclude each asset from the eigenfunctions it is regressed on");
  fpca->add_option("--lambda-beta", lambda_beta, "Roughness penalty of the coefficient functions");

  bool diff = false;
  std::string methods;
  auto* comm = app.add_subcommand("commonality", "Scalar PCA/ICA commonality regressions");
  add_common(comm, common);
  comm->add_flag("--diff", diff, "Use first differences instead of levels");
  comm->add_option("--method", methods, "Comma-separated subset of pca,ica");

  auto* run = app.add_subcommand("run", "Run every stage");
  add_common(run, common);
  run->add_option("--lambda", lambda, "Smoothing parameter")->check(CLI::NonNegativeNumber);
  run->add_option("--gcv-grid", gcv_grid, "Choose lambda by GCV over this many log-spaced values");
  run->add_flag("--loo", loo, "Exclude each asset from the eigenfunctions it is regressed on");
  run->add_flag("--diff", diff, "Use first differences instead of levels");
  run->add_option("--methods", methods, "Comma-separated subset of pca,ica,fpca-regression");

  CLI11_PARSE(app, argc, argv);

  if (lambda >= 0.0) common.extra["lrp.lambda"] = std::to_string(lambda);
  if (gcv_grid > 0) {
    common.extra["lrp.gcv"] = "true";
    common.extra["lrp.gcv_grid"] = std::to_string(gcv_grid);
  }
  if (loo) common.extra["fpca.loo"] = "true";
  if (lambda_beta >= 0.0) common.extra["fpca.lambda_beta"] = std::to_string(lambda_beta);
  if (diff) common.extra["commonality.diff"] = "true";
  if (!methods.empty()) common.extra["methods"] = methods;
  if (!synth_out.empty()) common.extra["events_dir"] = synth_out;

  try {
    if (*recon) return reconstruct(events, at, levels, automatch);
    if (*synth) return run_stage(common, LOBRES_STAGE_SYNTH);
    if (*measure) return run_stage(common, LOBRES_STAGE_MEASURE);
    if (*ted) return run_stage(common, LOBRES_STAGE_TED);
    if (*lrp) return run_stage(common, LOBRES_STAGE_LRP);
    if (*fpca) return run_stage(common, LOBRES_STAGE_FPCA);
    if (*comm) return run_stage(common, LOBRES_STAGE_COMMONALITY);
    if (*run) return run_stage(common, LOBRES_STAGE_ALL);
  } catch (const Failure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.status == LOBRES_CONFIG ? 2 : 1;
  }
  return 0;
}
