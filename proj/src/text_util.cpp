#include "semtype/text_util.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "semtype/error.hpp"

namespace semtype::text {

namespace {

// Byte offset of every code point boundary, plus the terminal offset.
std::vector<std::size_t> codepoint_offsets(std::string_view s) {
    std::vector<std::size_t> offsets;
    offsets.reserve(s.size() + 1);
    std::size_t i = 0;
    while (i < s.size()) {
        offsets.push_back(i);
        const auto lead = static_cast<unsigned char>(s[i]);
        std::size_t width = 0;
        if (lead < 0x80) width = 1;
        else if ((lead >> 5) == 0x6) width = 2;
        else if ((lead >> 4) == 0xE) width = 3;
        else if ((lead >> 3) == 0x1E) width = 4;
        else throw ParseError("invalid UTF-8 lead byte at offset " + std::to_string(i));
        if (i + width > s.size()) throw ParseError("truncated UTF-8 sequence at offset " + std::to_string(i));
        for (std::size_t j = 1; j < width; ++j) {
            if ((static_cast<unsigned char>(s[i + j]) >> 6) != 0x2) {
                throw ParseError("invalid UTF-8 continuation byte at offset " + std::to_string(i + j));
            }
        }
        i += width;
    }
    offsets.push_back(s.size());
    return offsets;
}

}  // namespace

std::size_t codepoint_length(std::string_view utf8) { return codepoint_offsets(utf8).size() - 1; }

std::string codepoint_substr(std::string_view utf8, std::size_t start, std::size_t end) {
    const auto offsets = codepoint_offsets(utf8);
    const std::size_t n = offsets.size() - 1;
    if (start > end || end > n) {
        throw ValidationError("code point range [" + std::to_string(start) + ", " + std::to_string(end) +
                              ") out of bounds for length " + std::to_string(n));
    }
    return std::string(utf8.substr(offsets[start], offsets[end] - offsets[start]));
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

double round_half_up(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    // The 1e-9 nudge absorbs binary representation error at exact halves (0.80625 * 100).
    const double scaled = std::fabs(value) * scale;
    const double rounded = std::floor(scaled + 0.5 + 1e-9) / scale;
    return std::copysign(rounded, value);
}

std::string format_fixed(double value, int decimals) {
    std::string out = fmt::format("{:.{}f}", round_half_up(value, decimals), decimals);
    if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_optional_double(std::string_view field) {
    if (field.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("malformed number '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace semtype::text
