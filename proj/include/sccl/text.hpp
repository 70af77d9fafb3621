#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sccl::text {

/// Unicode NFC; throws DataError on invalid UTF-8.
std::string nfc(std::string_view utf8);

/// Splits UTF-8 into one string per code point.
std::vector<std::string> code_points(std::string_view utf8);

std::vector<std::string> split_whitespace(std::string_view line);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Strict full-string parse; std::nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);

/// Strips a trailing '\r' left by CRLF files.
std::string_view chomp(std::string_view line);

}  // namespace sccl::text
