#pragma once

// Event files: one asset per file, CSV or NDJSON with the columns
// timestamp_ms,symbol,kind,side,order_id,price_ticks,volume

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "core/lob.hpp"

namespace lobres::io {

std::vector<lob::OrderEvent> parse_events_csv(std::string_view text);
std::vector<lob::OrderEvent> parse_events_ndjson(std::string_view text);

/// Dispatches on extension: .ndjson/.jsonl are NDJSON, everything else CSV.
std::vector<lob::OrderEvent> read_events(const std::filesystem::path& path);

void write_events_csv(std::ostream& out, const std::vector<lob::OrderEvent>& events);
void write_events_csv(const std::filesystem::path& path, const std::vector<lob::OrderEvent>& events);
void write_events_ndjson(std::ostream& out, const std::vector<lob::OrderEvent>& events);

std::string read_file(const std::filesystem::path& path);

lob::EventKind parse_kind(std::string_view s);
lob::Side parse_side(std::string_view s);

}  // namespace lobres::io
