#include "sccl/text.hpp"

#include <charconv>
#include <system_error>

#include <unicode/normalizer2.h>
#include <unicode/utf8.h>
#include <unicode/unistr.h>

#include "sccl/error.hpp"

namespace sccl::text {

std::string nfc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw DataError("ICU NFC normalizer unavailable");
  // fromUTF8 silently substitutes U+FFFD, so reject ill-formed input first.
  const auto len = static_cast<int32_t>(utf8.size());
  for (int32_t i = 0; i < len;) {
    UChar32 c = 0;
    U8_NEXT(utf8.data(), i, len, c);
    if (c < 0) throw DataError("invalid UTF-8 input");
  }
  const auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), len));
  if (norm->isNormalized(src, status) && U_SUCCESS(status)) return std::string(utf8);
  status = U_ZERO_ERROR;
  const icu::UnicodeString out = norm->normalize(src, status);
  if (U_FAILURE(status)) throw DataError("NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::vector<std::string> code_points(std::string_view utf8) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < utf8.size()) {
    const auto lead = static_cast<unsigned char>(utf8[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    if (i + len > utf8.size()) throw DataError("truncated UTF-8 sequence");
    out.emplace_back(utf8.substr(i, len));
    i += len;
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw DataError("cannot format number");
  return std::string(buf, end);
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace sccl::text
