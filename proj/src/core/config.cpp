#include "core/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>

#include "core/error.hpp"
#include "core/event_io.hpp"
#include "core/format.hpp"

namespace lobres::config {

namespace {

std::string unquote(std::string_view v) {
  v = fmt::trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#' || c == ';') {
      return line.substr(0, i);
    }
  }
  return line;
}

double to_double(std::string_view key, std::string_view v) {
  try {
    const double d = fmt::parse_num(v);
    if (std::isnan(d)) fail(ErrorCode::Config, "");
    return d;
  } catch (const Error&) {
    fail(ErrorCode::Config, "config key '" + std::string(key) + "': expected a number, got '" + std::string(v) + "'");
  }
}

long long to_int(std::string_view key, std::string_view v) {
  v = fmt::trim(v);
  long long out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    fail(ErrorCode::Config, "config key '" + std::string(key) + "': expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

using Setter = std::function<void(PipelineConfig&, const std::string&, const std::string&)>;

synth::SynthSpec& synth_of(PipelineConfig& c) {
  if (!c.synth) c.synth.emplace();
  return *c.synth;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    t["input"] = [](auto& c, auto&, auto& v) { c.input = v; };
    t["output"] = [](auto& c, auto&, auto& v) { c.output_dir = v; };
    t["events_dir"] = [](auto& c, auto&, auto& v) { c.events_dir = v; };
    t["metadata"] = [](auto& c, auto&, auto& v) { c.metadata = v; };
    t["workers"] = [](auto& c, auto& k, auto& v) { c.workers = static_cast<unsigned>(to_int(k, v)); };
    t["plots"] = [](auto& c, auto&, auto& v) { c.plots = parse_bool(v); };
    t["cache"] = [](auto& c, auto&, auto& v) { c.cache = parse_bool(v); };
    t["methods"] = [](auto& c, auto&, auto& v) {
      c.methods.clear();
      for (auto m : fmt::split(v, ',')) {
        const auto name = std::string(fmt::trim(m));
        if (!name.empty()) c.methods.insert(name);
      }
    };
    t["measure.kind"] = [](auto& c, auto& k, auto& v) {
      try {
        c.measure.kind = liquidity::parse_measure_kind(v);
      } catch (const Error&) {
        fail(ErrorCode::Config, "config key '" + k + "': unknown measure '" + v + "'");
      }
    };
    t["measure.r_cap"] = [](auto& c, auto& k, auto& v) { c.measure.r_cap = to_double(k, v); };
    t["measure.max_levels"] = [](auto& c, auto& k, auto& v) {
      c.measure.max_levels = static_cast<std::size_t>(to_int(k, v));
    };
    t["measure.currency_mode"] = [](auto& c, auto&, auto& v) { c.measure.currency_mode = parse_bool(v); };
    t["measure.tick_size"] = [](auto& c, auto& k, auto& v) { c.measure.tick_size = to_double(k, v); };
    t["measure.cross_policy"] = [](auto& c, auto& k, auto& v) {
      if (v == "reject") {
        c.cross_policy = lob::CrossPolicy::Reject;
      } else if (v == "automatch") {
        c.cross_policy = lob::CrossPolicy::AutoMatch;
      } else {
        fail(ErrorCode::Config, "config key '" + k + "': expected reject or automatch");
      }
    };
    t["session.open"] = [](auto& c, auto&, auto& v) { c.session.open_ms = parse_clock(v); };
    t["session.close"] = [](auto& c, auto&, auto& v) { c.session.close_ms = parse_clock(v); };
    t["sampling.interval_ms"] = [](auto& c, auto& k, auto& v) { c.interval_ms = to_int(k, v); };
    t["thresholds.scheme"] = [](auto& c, auto&, auto& v) { c.thresholds = v; };
    t["lrp.lambda"] = [](auto& c, auto& k, auto& v) { c.lambda = to_double(k, v); };
    t["lrp.gcv"] = [](auto& c, auto&, auto& v) { c.gcv = parse_bool(v); };
    t["lrp.gcv_grid"] = [](auto& c, auto& k, auto& v) { c.gcv_grid = static_cast<std::size_t>(to_int(k, v)); };
    t["fpca.q"] = [](auto& c, auto& k, auto& v) { c.q = static_cast<int>(to_int(k, v)); };
    t["fpca.lambda_beta"] = [](auto& c, auto& k, auto& v) { c.lambda_beta = to_double(k, v); };
    t["fpca.grid_points"] = [](auto& c, auto& k, auto& v) {
      c.grid_points = static_cast<std::size_t>(to_int(k, v));
    };
    t["fpca.loo"] = [](auto& c, auto&, auto& v) { c.leave_one_out = parse_bool(v); };
    t["commonality.diff"] = [](auto& c, auto&, auto& v) { c.differences = parse_bool(v); };
    t["commonality.ica_seed"] = [](auto& c, auto& k, auto& v) {
      c.ica_seed = static_cast<std::uint64_t>(to_int(k, v));
    };

    auto sd = [&t](const std::string& name, double synth::SynthSpec::*field) {
      t["synth." + name] = [field](auto& c, auto& k, auto& v) { synth_of(c).*field = to_double(k, v); };
    };
    auto si = [&t](const std::string& name, auto synth::SynthSpec::*field) {
      t["synth." + name] = [field](auto& c, auto& k, auto& v) {
        using T = std::remove_reference_t<decltype(synth_of(c).*field)>;
        synth_of(c).*field = static_cast<T>(to_int(k, v));
      };
    };
    auto sl = [&t](const std::string& name, std::vector<double> synth::SynthSpec::*field) {
      t["synth." + name] = [field](auto& c, auto& k, auto& v) {
        try {
          synth_of(c).*field = parse_list(v);
        } catch (const Error&) {
          fail(ErrorCode::Config, "config key '" + k + "': expected a comma-separated list of numbers");
        }
      };
    };
    si("n_assets", &synth::SynthSpec::n_assets);
    si("days", &synth::SynthSpec::days);
    si("session_ms", &synth::SynthSpec::session_ms);
    si("step_ms", &synth::SynthSpec::step_ms);
    si("max_spread", &synth::SynthSpec::max_spread);
    si("depth", &synth::SynthSpec::depth);
    si("lot", &synth::SynthSpec::lot);
    si("start_price", &synth::SynthSpec::start_price);
    si("seed", &synth::SynthSpec::seed);
    sd("base_spread", &synth::SynthSpec::base_spread);
    sd("spread_vol", &synth::SynthSpec::spread_vol);
    sd("default_loading", &synth::SynthSpec::default_loading);
    sd("default_half_life_ms", &synth::SynthSpec::default_half_life_ms);
    sd("default_tail_sigma", &synth::SynthSpec::default_tail_sigma);
    sd("common_half_life_ms", &synth::SynthSpec::common_half_life_ms);
    sd("jumps_per_half_life", &synth::SynthSpec::jumps_per_half_life);
    sd("half_life_jitter", &synth::SynthSpec::half_life_jitter);
    sd("spike_rate", &synth::SynthSpec::spike_rate);
    sd("spike_scale", &synth::SynthSpec::spike_scale);
    sd("event_rate", &synth::SynthSpec::event_rate);
    sd("execute_share", &synth::SynthSpec::execute_share);
    sd("mid_vol", &synth::SynthSpec::mid_vol);
    sl("loadings", &synth::SynthSpec::loadings);
    sl("half_lives_ms", &synth::SynthSpec::half_lives_ms);
    sl("tail_sigmas", &synth::SynthSpec::tail_sigmas);
    t["synth.open"] = [](auto& c, auto&, auto& v) { synth_of(c).open_ms = parse_clock(v); };
    t["synth.symbol_prefix"] = [](auto& c, auto&, auto& v) { synth_of(c).symbol_prefix = v; };
    return t;
  }();
  return table;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt::num(v[i]);
  return out;
}

}  // namespace

KeyValues KeyValues::parse(std::string_view text) {
  KeyValues kv;
  std::string section;
  std::size_t line_no = 0;
  for (std::string_view raw : fmt::split(text, '\n')) {
    ++line_no;
    const std::string_view line = fmt::trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::Config, "line " + std::to_string(line_no) + ": unterminated section");
      section = std::string(fmt::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::Config, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = std::string(fmt::trim(line.substr(0, eq)));
    if (key.empty()) fail(ErrorCode::Config, "line " + std::to_string(line_no) + ": empty key");
    kv.set(section.empty() ? key : section + "." + key, unquote(line.substr(eq + 1)));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) { return parse(io::read_file(path)); }

std::optional<std::string> KeyValues::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

bool is_known_key(const std::string& key) { return setters().count(key) != 0; }

bool parse_bool(std::string_view s) {
  s = fmt::trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  fail(ErrorCode::Config, "expected a boolean, got '" + std::string(s) + "'");
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  s = fmt::trim(s);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  if (fmt::trim(s).empty()) return out;
  for (auto item : fmt::split(s, ',')) out.push_back(fmt::parse_num(item));
  return out;
}

lob::TimestampMs parse_clock(std::string_view s) {
  s = fmt::trim(s);
  if (s.find(':') == std::string_view::npos) return to_int("time", s);
  const auto parts = fmt::split(s, ':');
  if (parts.size() < 2 || parts.size() > 3) fail(ErrorCode::Config, "bad clock time '" + std::string(s) + "'");
  const long long h = to_int("hours", parts[0]);
  const long long m = to_int("minutes", parts[1]);
  double sec = 0.0;
  if (parts.size() == 3) sec = to_double("seconds", parts[2]);
  if (h < 0 || m < 0 || m >= 60 || sec < 0.0 || sec >= 60.0) {
    fail(ErrorCode::Config, "bad clock time '" + std::string(s) + "'");
  }
  return (h * 3600 + m * 60) * 1000 + static_cast<lob::TimestampMs>(std::llround(sec * 1000.0));
}

std::string format_clock(lob::TimestampMs ms) {
  char buf[32];
  const long long s = ms / 1000;
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", s / 3600, (s / 60) % 60, s % 60);
  std::string out = buf;
  if (ms % 1000 != 0) out += "." + std::to_string(1000 + ms % 1000).substr(1);
  return out;
}

unsigned workers_from_env(unsigned fallback) {
  const char* env = std::getenv("LOBRES_WORKERS");
  if (env == nullptr) return fallback;
  unsigned v = 0;
  const std::string_view s(env);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) return fallback;
  return v;
}

PipelineConfig PipelineConfig::from(const KeyValues& kv) {
  PipelineConfig c;
  const auto& table = setters();
  for (const auto& [key, value] : kv.entries()) {
    const auto it = table.find(key);
    if (it == table.end()) fail(ErrorCode::Config, "unknown config key '" + key + "'");
    it->second(c, key, value);
  }
  // A synthetic panel defines its own session unless one is given.
  if (c.synth) {
    if (!kv.has("session.open")) c.session.open_ms = c.synth->open_ms;
    if (!kv.has("session.close")) c.session.close_ms = c.session.open_ms + c.synth->session_ms;
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) { return from(KeyValues::load(path)); }

void PipelineConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::Config, what); };
  try {
    measure.validate();
  } catch (const Error& e) {
    bad(std::string("measure: ") + e.what());
  }
  if (session.close_ms <= session.open_ms) bad("session close must follow open");
  if (interval_ms <= 0) bad("sampling interval must be positive");
  if (thresholds != "deciles") bad("only the 'deciles' threshold scheme is supported");
  if (!(lambda >= 0.0)) bad("lambda must be non-negative");
  if (gcv_grid < 2) bad("GCV grid needs at least two points");
  if (q < 1 || q > 7) bad("q must lie in 1..7");
  if (!(lambda_beta >= 0.0)) bad("lambda_beta must be non-negative");
  if (grid_points < 2) bad("fpca grid needs at least two points");
  for (const auto& m : methods) {
    if (m != "pca" && m != "ica" && m != "fpca-regression") bad("unknown method '" + m + "'");
  }
  if (workers == 0) bad("workers must be positive");
  if (!metadata.empty() && !std::filesystem::exists(metadata)) {
    bad("metadata file " + metadata.string() + " does not exist");
  }
  if (synth) {
    try {
      synth->validate();
    } catch (const Error& e) {
      bad(e.what());
    }
  }
}

std::string PipelineConfig::canonical() const {
  std::ostringstream o;
  o << "input=" << input << '\n'
    << "metadata=" << metadata.string() << '\n'
    << "measure.kind=" << liquidity::to_string(measure.kind) << '\n'
    << "measure.r_cap=" << fmt::num(measure.r_cap) << '\n'
    << "measure.max_levels=" << measure.max_levels << '\n'
    << "measure.currency_mode=" << measure.currency_mode << '\n'
    << "measure.tick_size=" << fmt::num(measure.tick_size) << '\n'
    << "measure.cross_policy=" << (cross_policy == lob::CrossPolicy::Reject ? "reject" : "automatch") << '\n'
    << "session.open=" << session.open_ms << '\n'
    << "session.close=" << session.close_ms << '\n'
    << "sampling.interval_ms=" << interval_ms << '\n'
    << "thresholds.scheme=" << thresholds << '\n'
    << "lrp.lambda=" << fmt::num(lambda) << '\n'
    << "lrp.gcv=" << gcv << '\n'
    << "lrp.gcv_grid=" << gcv_grid << '\n'
    << "fpca.q=" << q << '\n'
    << "fpca.lambda_beta=" << fmt::num(lambda_beta) << '\n'
    << "fpca.grid_points=" << grid_points << '\n'
    << "fpca.loo=" << leave_one_out << '\n'
    << "commonality.diff=" << differences << '\n'
    << "commonality.ica_seed=" << ica_seed << '\n'
    << "plots=" << plots << '\n';
  o << "methods=";
  for (const auto& m : methods) o << m << ';';
  o << '\n';
  if (synth) {
    const auto& s = *synth;
    o << "synth=" << s.n_assets << ';' << s.days << ';' << s.open_ms << ';' << s.session_ms << ';' << s.step_ms
      << ';' << fmt::num(s.base_spread) << ';' << fmt::num(s.spread_vol) << ';' << s.max_spread << ';'
      << join(s.loadings) << ';' << fmt::num(s.default_loading) << ';' << join(s.half_lives_ms) << ';'
      << fmt::num(s.default_half_life_ms) << ';' << join(s.tail_sigmas) << ';' << fmt::num(s.default_tail_sigma)
      << ';' << fmt::num(s.common_half_life_ms) << ';' << fmt::num(s.jumps_per_half_life) << ';'
      << fmt::num(s.half_life_jitter) << ';' << fmt::num(s.spike_rate) << ';' << fmt::num(s.spike_scale) << ';'
      << fmt::num(s.event_rate) << ';' << fmt::num(s.execute_share) << ';' << fmt::num(s.mid_vol) << ';'
      << s.depth << ';' << s.lot << ';' << s.start_price << ';' << s.seed << ';' << s.symbol_prefix << '\n';
  }
  return o.str();
}

}  // namespace lobres::config
