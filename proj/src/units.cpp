#include "lifrc/units.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace lifrc {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

template <std::size_t N>
double parse_with(std::string_view text, const std::array<std::pair<std::string_view, double>, N>& units,
                  const char* what) {
    const std::string s = lower(text);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || end == s.data())
        throw std::invalid_argument(std::string("malformed ") + what + ": '" + std::string(text) + "'");
    const std::string_view suffix(end, static_cast<std::size_t>(s.data() + s.size() - end));
    for (const auto& [name, scale] : units) {
        if (suffix == name) {
            const double v = value * scale;
            if (!std::isfinite(v) || v <= 0.0)
                throw std::invalid_argument(std::string(what) + " must be positive: '" + std::string(text) + "'");
            return v;
        }
    }
    throw std::invalid_argument(std::string("unknown unit in ") + what + ": '" + std::string(text) + "'");
}

} // namespace

double parse_duration(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, double>, 5> units{
        {{"", 1.0}, {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}}};
    return parse_with(text, units, "duration");
}

double parse_frequency(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, double>, 4> units{
        {{"", 1.0}, {"hz", 1.0}, {"khz", 1e3}, {"mhz", 1e6}}};
    return parse_with(text, units, "frequency");
}

} // namespace lifrc
