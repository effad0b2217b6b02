#include "narmine/text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <system_error>

namespace nm::text {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split(std::string_view text, char delimiter) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = text.find(delimiter, start);
    if (end == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, end - start));
    start = end + 1;
  }
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i > start) parts.push_back(text.substr(start, i - start));
  }
  return parts;
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  return text;
}

namespace {

std::uint64_t pow10(int decimals) {
  std::uint64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  return scale;
}

std::string render_scaled(std::uint64_t scaled, int decimals, bool negative) {
  const std::uint64_t scale = pow10(decimals);
  std::string out = negative ? "-" : "";
  out += std::to_string(scaled / scale);
  if (decimals > 0) {
    std::string frac = std::to_string(scaled % scale);
    out += '.';
    out.append(static_cast<std::size_t>(decimals) - frac.size(), '0');
    out += frac;
  }
  return out;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  const bool negative = value < 0;
  const double magnitude = std::fabs(value);
  const double scaled = magnitude * static_cast<double>(pow10(decimals));
  const double rounded = std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, scaled));
  if (rounded >= 1.8e19) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", decimals, value);
    return buffer;
  }
  const auto as_int = static_cast<std::uint64_t>(rounded);
  return render_scaled(as_int, decimals, negative && as_int != 0);
}

std::string format_ratio(std::uint64_t numerator, std::uint64_t denominator,
                         int decimals) {
  if (denominator == 0) return "nan";
  __extension__ typedef unsigned __int128 u128;
  const u128 scaled = static_cast<u128>(numerator) * pow10(decimals);
  // floor(num * 10^d / den + 1/2)
  const u128 rounded = (2 * scaled + denominator) / (2 * static_cast<u128>(denominator));
  return render_scaled(static_cast<std::uint64_t>(rounded), decimals, false);
}

std::string to_lower_camel(std::string_view words) {
  std::string out;
  bool first = true;
  for (std::string_view word : split_whitespace(words)) {
    bool all_upper = true;
    for (char ch : word)
      if (std::islower(static_cast<unsigned char>(ch))) all_upper = false;
    for (std::size_t i = 0; i < word.size(); ++i) {
      const auto c = static_cast<unsigned char>(word[i]);
      if (i == 0)
        out += static_cast<char>(first ? std::tolower(c) : std::toupper(c));
      else
        out += static_cast<char>(all_upper ? std::tolower(c) : c);
    }
    first = false;
  }
  return out;
}

bool parse_double(std::string_view token, double& out) {
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool parse_uint(std::string_view token, std::uint64_t& out) {
  if (token.empty()) return false;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace nm::text
