#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace gemmlab {

// Shortest decimal representation that parses back to the identical double.
std::string format_roundtrip(double value);

// General notation with `digits` significant digits (like printf "%.*g").
std::string format_significant(double value, int digits = 6);

// Parses the whole of `text` as a double; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

std::optional<unsigned long long> parse_unsigned(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace gemmlab
