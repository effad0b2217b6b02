#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nm::text {

/// Splits on '\n'. A trailing '\r' on each line is removed. A final empty
/// segment after a terminating newline is not reported.
std::vector<std::string_view> split_lines(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char delimiter);
std::vector<std::string_view> split_whitespace(std::string_view text);
std::string_view trim(std::string_view text);

/// Fixed-point rendering with round-half-up at `decimals` places.
/// A relative slack of 1e-9 absorbs binary representation error, so 0.00125
/// renders as "0.0013" at 4 places.
std::string format_fixed(double value, int decimals);

/// Exact round-half-up rendering of numerator/denominator.
std::string format_ratio(std::uint64_t numerator, std::uint64_t denominator,
                         int decimals);

/// "toilet paper pile" -> "toiletPaperPile", "TV" -> "tv". Words that are
/// already camel-cased keep their inner capitals.
std::string to_lower_camel(std::string_view words);

bool parse_double(std::string_view token, double& out);
bool parse_uint(std::string_view token, std::uint64_t& out);

}  // namespace nm::text
