#pragma once

// Parsing of command-line quantities with unit suffixes.

#include <string_view>

namespace lifrc {

/// "120us", "0.05ms", "2s" or a bare number of seconds.
double parse_duration(std::string_view text);

/// "220Hz", "1.5kHz", "1MHz" or a bare number of hertz. Suffixes are
/// case-insensitive.
double parse_frequency(std::string_view text);

} // namespace lifrc
