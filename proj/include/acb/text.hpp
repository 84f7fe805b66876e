#pragma once

#include <string>
#include <string_view>
#include <vector>

// Locale-independent parsing and formatting shared by the truth parser, the
// config loader and the report writers.
namespace acb::text {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Throw ConfigError naming `what` on malformed input.
double parse_double(std::string_view s, std::string_view what);
long parse_long(std::string_view s, std::string_view what);
bool parse_bool(std::string_view s, std::string_view what);

// Shortest round-trip representation, '.' decimal point.
std::string format_double(double v);

}  // namespace acb::text
