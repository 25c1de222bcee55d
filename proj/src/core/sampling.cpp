#include "core/sampling.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "core/event_io.hpp"
#include "core/format.hpp"

namespace lobres::lob {

bool LiquiditySeries::operator==(const LiquiditySeries& o) const {
  if (times_ms != o.times_ms || values.size() != o.values.size()) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool a = std::isnan(values[i]);
    const bool b = std::isnan(o.values[i]);
    if (a != b || (!a && values[i] != o.values[i])) return false;
  }
  return true;
}

LiquiditySeries sample_series(std::span<const OrderEvent> events, const liquidity::MeasureSpec& measure,
                              const SessionWindow& session, TimestampMs interval_ms, CrossPolicy policy) {
  if (interval_ms <= 0) fail(ErrorCode::InvalidArgument, "sampling interval must be positive");
  if (session.close_ms <= session.open_ms) fail(ErrorCode::InvalidArgument, "empty session window");
  measure.validate();

  const auto count = static_cast<std::size_t>(session.length_ms() / interval_ms);
  const std::size_t depth = liquidity::levels_needed(measure);
  LiquiditySeries out;
  out.times_ms.reserve(count);
  out.values.reserve(count);

  OrderBook book(policy);
  std::size_t next = 0;
  for (std::size_t k = 1; k <= count; ++k) {
    const TimestampMs boundary = session.open_ms + static_cast<TimestampMs>(k) * interval_ms;
    while (next < events.size() && events[next].timestamp_ms <= boundary) book.apply(events[next++]);
    out.times_ms.push_back(boundary);
    out.values.push_back(liquidity::evaluate(book.snapshot(depth), measure));
  }
  return out;
}

LiquiditySeries event_time_series(std::span<const OrderEvent> events, const liquidity::MeasureSpec& measure,
                                  const SessionWindow& session, CrossPolicy policy) {
  measure.validate();
  const std::size_t depth = liquidity::levels_needed(measure);
  LiquiditySeries out;
  OrderBook book(policy);

  auto push = [&](TimestampMs t) {
    const double v = liquidity::evaluate(book.snapshot(depth), measure);
    if (!out.values.empty()) {
      const double last = out.values.back();
      if ((std::isnan(last) && std::isnan(v)) || last == v) return;
    }
    out.times_ms.push_back(t);
    out.values.push_back(v);
  };

  std::size_t i = 0;
  while (i < events.size() && events[i].timestamp_ms <= session.open_ms) book.apply(events[i++]);
  push(session.open_ms);
  while (i < events.size() && events[i].timestamp_ms < session.close_ms) {
    const TimestampMs t = events[i].timestamp_ms;
    while (i < events.size() && events[i].timestamp_ms == t) book.apply(events[i++]);
    push(t);
  }
  return out;
}

void write_series_csv(std::ostream& out, const LiquiditySeries& series) {
  out << "time_s,value\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << fmt::seconds(series.times_ms[i]) << ',' << fmt::num(series.values[i]) << '\n';
  }
}

void write_series_csv(const std::filesystem::path& path, const LiquiditySeries& series) {
  std::ostringstream ss;
  write_series_csv(ss, series);
  fmt::write_text(path, ss.str());
}

LiquiditySeries parse_series_csv(std::string_view text) {
  LiquiditySeries s;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = fmt::trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("time_s", 0) == 0) continue;
    }
    const auto cols = fmt::split(line, ',');
    if (cols.size() != 2) fail(ErrorCode::Parse, "series row needs 2 columns");
    s.times_ms.push_back(static_cast<TimestampMs>(std::llround(fmt::parse_num(cols[0]) * 1000.0)));
    s.values.push_back(fmt::parse_num(cols[1]));
  }
  return s;
}

LiquiditySeries read_series_csv(const std::filesystem::path& path) {
  return parse_series_csv(io::read_file(path));
}

}  // namespace lobres::lob
