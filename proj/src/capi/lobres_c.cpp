#include "lobres/lobres.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/event_io.hpp"
#include "core/liquidity.hpp"
#include "core/lob.hpp"
#include "core/pipeline.hpp"

using namespace lobres;

struct lobres_book {
  lob::OrderBook book;
};

struct lobres_config {
  config::KeyValues values;
};

struct lobres_report {
  pipeline::RunReport report;
  std::vector<pipeline::Failure> failures;
};

namespace {

thread_local std::string last_error;

lobres_status set_error(lobres_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class Fn>
lobres_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return LOBRES_OK;
  } catch (const Error& e) {
    return set_error(static_cast<lobres_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(LOBRES_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return set_error(LOBRES_IO, e.what());
  } catch (const std::exception& e) {
    return set_error(LOBRES_INTERNAL, e.what());
  }
}

lobres_status null_argument(const char* name) {
  return set_error(LOBRES_INVALID_ARGUMENT, std::string("null argument: ") + name);
}

lob::OrderEvent to_event(const lobres_event& e) {
  if (e.kind < LOBRES_SUBMIT || e.kind > LOBRES_CANCEL) fail(ErrorCode::InvalidArgument, "bad event kind");
  if (e.side != LOBRES_BID && e.side != LOBRES_ASK) fail(ErrorCode::InvalidArgument, "bad side");
  lob::OrderEvent out;
  out.timestamp_ms = e.timestamp_ms;
  out.kind = static_cast<lob::EventKind>(e.kind);
  out.side = e.side == LOBRES_BID ? lob::Side::Bid : lob::Side::Ask;
  out.order_id = e.order_id;
  out.price = e.price_ticks;
  out.volume = e.volume;
  return out;
}

}  // namespace

extern "C" {

const char* lobres_version(void) { return "1.0.0"; }

const char* lobres_last_error(void) { return last_error.c_str(); }

const char* lobres_status_name(lobres_status status) {
  if (status == LOBRES_OK) return "Ok";
  static thread_local std::string name;
  name = std::string(to_string(static_cast<ErrorCode>(static_cast<int>(status))));
  return name.c_str();
}

lobres_status lobres_parse_time(const char* text, int64_t* ms) {
  if (text == nullptr) return null_argument("text");
  if (ms == nullptr) return null_argument("ms");
  return guarded([&] { *ms = config::parse_clock(text); });
}

lobres_status lobres_book_create(int automatch, lobres_book** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    *out = new lobres_book{lob::OrderBook(automatch ? lob::CrossPolicy::AutoMatch : lob::CrossPolicy::Reject)};
  });
}

void lobres_book_destroy(lobres_book* book) { delete book; }

lobres_status lobres_book_apply(lobres_book* book, const lobres_event* event) {
  if (book == nullptr) return null_argument("book");
  if (event == nullptr) return null_argument("event");
  return guarded([&] { book->book.apply(to_event(*event)); });
}

lobres_status lobres_book_replay_file(const char* path, int automatch, int64_t until_ms, lobres_book** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    auto book = std::make_unique<lobres_book>(
        lobres_book{lob::OrderBook(automatch ? lob::CrossPolicy::AutoMatch : lob::CrossPolicy::Reject)});
    for (const auto& e : io::read_events(path)) {
      if (until_ms >= 0 && e.timestamp_ms > until_ms) break;
      book->book.apply(e);
    }
    *out = book.release();
  });
}

lobres_status lobres_book_best(const lobres_book* book, int64_t* bid_ticks, int64_t* ask_ticks) {
  if (book == nullptr) return null_argument("book");
  return guarded([&] {
    const auto bid = book->book.best_bid();
    const auto ask = book->book.best_ask();
    if (!bid || !ask) fail(ErrorCode::EmptySide, "book has an empty side");
    if (bid_ticks != nullptr) *bid_ticks = *bid;
    if (ask_ticks != nullptr) *ask_ticks = *ask;
  });
}

lobres_status lobres_book_levels(const lobres_book* book, int32_t side, lobres_level* levels, size_t capacity,
                                 size_t* count) {
  if (book == nullptr) return null_argument("book");
  if (side != LOBRES_BID && side != LOBRES_ASK) return set_error(LOBRES_INVALID_ARGUMENT, "bad side");
  if (levels == nullptr && capacity > 0) return null_argument("levels");
  return guarded([&] {
    const lob::Side s = side == LOBRES_BID ? lob::Side::Bid : lob::Side::Ask;
    const auto snap = book->book.snapshot(capacity);
    const auto& lv = snap.side(s);
    for (std::size_t i = 0; i < lv.size(); ++i) levels[i] = {lv[i].price, lv[i].total_volume, lv[i].order_count};
    if (count != nullptr) *count = book->book.level_count(s);
  });
}

lobres_status lobres_book_measure(const lobres_book* book, int32_t measure, double r_cap, double* value) {
  if (book == nullptr) return null_argument("book");
  if (value == nullptr) return null_argument("value");
  return guarded([&] {
    const auto snap = book->book.snapshot();
    if (measure == LOBRES_SPREAD) {
      *value = static_cast<double>(liquidity::spread(snap));
    } else if (measure == LOBRES_XLM) {
      liquidity::MeasureSpec spec;
      spec.kind = liquidity::MeasureKind::Xlm;
      spec.r_cap = r_cap;
      spec.validate();
      *value = liquidity::xlm(snap, spec);
    } else {
      fail(ErrorCode::InvalidArgument, "unknown measure");
    }
  });
}

lobres_status lobres_config_create(lobres_config** out) {
  if (out == nullptr) return null_argument("out");
  return guarded([&] { *out = new lobres_config{}; });
}

lobres_status lobres_config_load(const char* path, lobres_config** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    auto kv = config::KeyValues::load(path);
    for (const auto& [key, _] : kv.entries()) {
      if (!config::is_known_key(key)) fail(ErrorCode::Config, "unknown config key '" + key + "'");
    }
    *out = new lobres_config{std::move(kv)};
  });
}

void lobres_config_destroy(lobres_config* config) { delete config; }

lobres_status lobres_config_set(lobres_config* config, const char* key, const char* value) {
  if (config == nullptr) return null_argument("config");
  if (key == nullptr) return null_argument("key");
  if (value == nullptr) return null_argument("value");
  return guarded([&] {
    if (!config::is_known_key(key)) fail(ErrorCode::Config, std::string("unknown config key '") + key + "'");
    config->values.set(key, value);
  });
}

lobres_status lobres_config_get(const lobres_config* config, const char* key, char* buffer, size_t capacity,
                                size_t* needed) {
  if (config == nullptr) return null_argument("config");
  if (key == nullptr) return null_argument("key");
  return guarded([&] {
    const auto v = config->values.get(key);
    if (!v) fail(ErrorCode::Config, std::string("config key '") + key + "' is not set");
    if (needed != nullptr) *needed = v->size() + 1;
    if (buffer != nullptr && capacity > v->size()) std::memcpy(buffer, v->c_str(), v->size() + 1);
  });
}

lobres_status lobres_config_validate(const lobres_config* config) {
  if (config == nullptr) return null_argument("config");
  return guarded([&] { (void)config::PipelineConfig::from(config->values); });
}

lobres_status lobres_run_stage(const lobres_config* config, lobres_stage stage, lobres_report** out) {
  if (config == nullptr) return null_argument("config");
  if (out == nullptr) return null_argument("out");
  return guarded([&] {
    const auto cfg = config::PipelineConfig::from(config->values);
    auto report = std::make_unique<lobres_report>();
    auto& stages = report->report.stages;
    switch (stage) {
      case LOBRES_STAGE_SYNTH: stages.push_back(pipeline::run_synth(cfg)); break;
      case LOBRES_STAGE_MEASURE: stages.push_back(pipeline::run_measure(cfg)); break;
      case LOBRES_STAGE_TED: stages.push_back(pipeline::run_ted(cfg)); break;
      case LOBRES_STAGE_LRP: stages.push_back(pipeline::run_lrp(cfg)); break;
      case LOBRES_STAGE_FPCA: stages.push_back(pipeline::run_fpca(cfg)); break;
      case LOBRES_STAGE_COMMONALITY: stages.push_back(pipeline::run_commonality(cfg)); break;
      case LOBRES_STAGE_SUMMARY: stages.push_back(pipeline::write_summary(cfg, {})); break;
      case LOBRES_STAGE_ALL: report->report = pipeline::run_pipeline(cfg); break;
      default: fail(ErrorCode::InvalidArgument, "unknown stage");
    }
    report->failures = report->report.failures();
    *out = report.release();
  });
}

void lobres_report_destroy(lobres_report* report) { delete report; }

size_t lobres_report_stage_count(const lobres_report* report) {
  return report == nullptr ? 0 : report->report.stages.size();
}

lobres_status lobres_report_stage(const lobres_report* report, size_t index, const char** name, size_t* tasks,
                                  size_t* cached, size_t* failed) {
  if (report == nullptr) return null_argument("report");
  if (index >= report->report.stages.size()) return set_error(LOBRES_OUT_OF_RANGE, "stage index out of range");
  const auto& s = report->report.stages[index];
  if (name != nullptr) *name = s.stage.c_str();
  if (tasks != nullptr) *tasks = s.tasks;
  if (cached != nullptr) *cached = s.cached;
  if (failed != nullptr) *failed = s.failures.size();
  return LOBRES_OK;
}

size_t lobres_report_failure_count(const lobres_report* report) {
  return report == nullptr ? 0 : report->failures.size();
}

lobres_status lobres_report_failure(const lobres_report* report, size_t index, const char** stage,
                                    const char** symbol, const char** day, lobres_status* code,
                                    const char** message) {
  if (report == nullptr) return null_argument("report");
  if (index >= report->failures.size()) return set_error(LOBRES_OUT_OF_RANGE, "failure index out of range");
  const auto& f = report->failures[index];
  if (stage != nullptr) *stage = f.stage.c_str();
  if (symbol != nullptr) *symbol = f.symbol.c_str();
  if (day != nullptr) *day = f.day.c_str();
  if (code != nullptr) *code = static_cast<lobres_status>(static_cast<int>(f.code));
  if (message != nullptr) *message = f.message.c_str();
  return LOBRES_OK;
}

}  // extern "C"
