#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace slice_embed {

/// Shortest representation that parses back to the identical double.
std::string format_number(double value);

/// Strict full-string parse; throws std::invalid_argument on junk.
double parse_number(std::string_view text);
long long parse_integer(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char separator);
std::vector<std::string_view> split_whitespace(std::string_view text);

}  // namespace slice_embed
