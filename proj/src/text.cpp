#include "acb/text.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "acb/errors.hpp"

namespace acb::text {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(sep, start);
        const auto end = pos == std::string_view::npos ? s.size() : pos;
        auto item = trim(s.substr(start, end - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view s, std::string_view what) {
    const auto t = trim(s);
    double v = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (!t.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (t.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError("expected a number for " + std::string(what) + ", got '" + t + "'");
    }
    return v;
}

long parse_long(std::string_view s, std::string_view what) {
    const auto t = trim(s);
    long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError("expected an integer for " + std::string(what) + ", got '" + t + "'");
    }
    return v;
}

bool parse_bool(std::string_view s, std::string_view what) {
    const auto t = trim(s);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ConfigError("expected a boolean for " + std::string(what) + ", got '" + t + "'");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

}  // namespace acb::text
