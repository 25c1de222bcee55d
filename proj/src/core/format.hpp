#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lobres::fmt {

/// Shortest round-trip representation; NaN as "NA", infinities as "inf"/"-inf".
std::string num(double v);

/// Milliseconds rendered as decimal seconds without rounding ("28801.5").
std::string seconds(std::int64_t ms);

/// Parses a number written by num(); "NA" and "nan" give NaN.
double parse_num(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

/// Writes atomically enough for our purposes: truncates then writes.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace lobres::fmt
