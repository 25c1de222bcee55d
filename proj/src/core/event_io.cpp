#include "core/event_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"

namespace lobres::io {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_int(std::string_view s, std::size_t line, std::string_view column) {
  s = trim(s);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    fail(ErrorCode::Parse, "line " + std::to_string(line) + ": bad " + std::string(column) + " '" +
                               std::string(s) + "'");
  }
  return value;
}

}  // namespace

lob::EventKind parse_kind(std::string_view s) {
  const std::string k = lower(trim(s));
  if (k == "s" || k == "submit" || k == "add") return lob::EventKind::Submit;
  if (k == "e" || k == "execute" || k == "exec" || k == "trade") return lob::EventKind::Execute;
  if (k == "c" || k == "cancel" || k == "delete") return lob::EventKind::Cancel;
  fail(ErrorCode::Parse, "unknown event kind '" + std::string(s) + "'");
}

lob::Side parse_side(std::string_view s) {
  const std::string k = lower(trim(s));
  if (k == "b" || k == "bid" || k == "buy") return lob::Side::Bid;
  if (k == "a" || k == "ask" || k == "sell" || k == "s") return lob::Side::Ask;
  fail(ErrorCode::Parse, "unknown side '" + std::string(s) + "'");
}

std::vector<lob::OrderEvent> parse_events_csv(std::string_view text) {
  std::vector<lob::OrderEvent> events;
  events.reserve(text.size() / 40);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::array<std::string_view, 7> fields;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;

    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (n == fields.size()) {
        fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 7 columns");
      }
      fields[n++] = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (n != fields.size()) fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 7 columns");
    if (line_no == 1 && trim(fields[0]) == "timestamp_ms") continue;

    lob::OrderEvent e;
    e.timestamp_ms = parse_int<lob::TimestampMs>(fields[0], line_no, "timestamp_ms");
    e.symbol = std::string(trim(fields[1]));
    e.kind = parse_kind(fields[2]);
    e.side = parse_side(fields[3]);
    e.order_id = parse_int<lob::OrderId>(fields[4], line_no, "order_id");
    e.price = parse_int<lob::Ticks>(fields[5], line_no, "price_ticks");
    e.volume = parse_int<lob::Volume>(fields[6], line_no, "volume");
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<lob::OrderEvent> parse_events_ndjson(std::string_view text) {
  std::vector<lob::OrderEvent> events;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      lob::OrderEvent e;
      e.timestamp_ms = j.at("timestamp_ms").get<lob::TimestampMs>();
      e.symbol = j.at("symbol").get<std::string>();
      e.kind = parse_kind(j.at("kind").get<std::string>());
      e.side = parse_side(j.at("side").get<std::string>());
      const auto& id = j.at("order_id");
      e.order_id = id.is_string() ? std::stoull(id.get<std::string>()) : id.get<lob::OrderId>();
      e.price = j.at("price_ticks").get<lob::Ticks>();
      e.volume = j.at("volume").get<lob::Volume>();
      events.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + ex.what());
    } catch (const std::logic_error& ex) {
      fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": bad order_id");
    }
  }
  return events;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<lob::OrderEvent> read_events(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto ext = path.extension().string();
  try {
    if (ext == ".ndjson" || ext == ".jsonl") return parse_events_ndjson(text);
    return parse_events_csv(text);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_events_csv(std::ostream& out, const std::vector<lob::OrderEvent>& events) {
  out << "timestamp_ms,symbol,kind,side,order_id,price_ticks,volume\n";
  std::string line;
  for (const auto& e : events) {
    line.clear();
    line += std::to_string(e.timestamp_ms);
    line += ',';
    line += e.symbol;
    line += ',';
    line += e.kind == lob::EventKind::Submit ? 'S' : e.kind == lob::EventKind::Execute ? 'E' : 'C';
    line += ',';
    line += e.side == lob::Side::Bid ? 'B' : 'A';
    line += ',';
    line += std::to_string(e.order_id);
    line += ',';
    line += std::to_string(e.price);
    line += ',';
    line += std::to_string(e.volume);
    line += '\n';
    out << line;
  }
}

void write_events_csv(const std::filesystem::path& path, const std::vector<lob::OrderEvent>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  write_events_csv(out, events);
}

void write_events_ndjson(std::ostream& out, const std::vector<lob::OrderEvent>& events) {
  for (const auto& e : events) {
    nlohmann::json j{{"timestamp_ms", e.timestamp_ms}, {"symbol", e.symbol},
                     {"kind", std::string(lob::to_string(e.kind))}, {"side", std::string(lob::to_string(e.side))},
                     {"order_id", e.order_id}, {"price_ticks", e.price}, {"volume", e.volume}};
    out << j.dump() << '\n';
  }
}

}  // namespace lobres::io
