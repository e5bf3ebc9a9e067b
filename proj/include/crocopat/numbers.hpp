#pragma once

#include <string>
#include <string_view>

namespace crocopat {

/// NUMBER(s): the value of `s` if the whole string is an (optionally signed)
/// numeric literal, otherwise 0.0.
double parse_number(std::string_view text);

/// Integral values with magnitude below 2^53 print without a fraction;
/// everything else uses the shortest round-trip representation.
std::string format_number(double value);

}  // namespace crocopat
