#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semtype::text {

/// Number of Unicode code points in a UTF-8 string. Throws ParseError on
/// invalid UTF-8.
std::size_t codepoint_length(std::string_view utf8);

/// Code-point substring [start, end) of a UTF-8 string.
std::string codepoint_substr(std::string_view utf8, std::size_t start, std::size_t end);

std::string ascii_lower(std::string_view s);

/// Fixed-point rendering with `decimals` places, rounding half away from zero.
std::string format_fixed(double value, int decimals);

/// `value` rounded half-up at `decimals` places.
double round_half_up(double value, int decimals);

/// Splits one CSV line on commas. Fields never contain commas or quotes in the
/// files this library writes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Empty field -> nullopt. Throws ParseError on a malformed number.
std::optional<double> parse_optional_double(std::string_view field);

}  // namespace semtype::text
