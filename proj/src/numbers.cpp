#include "crocopat/numbers.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace crocopat {
namespace {

bool digit(char c) { return c >= '0' && c <= '9'; }

// [+-]? digits? ('.' digits?)? ([eE] [+-]? digits)? with at least one
// mantissa digit.
bool is_numeric_literal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t mantissa_digits = 0;
  while (i < s.size() && digit(s[i])) ++i, ++mantissa_digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && digit(s[i])) ++i, ++mantissa_digits;
  }
  if (mantissa_digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exponent_digits = 0;
    while (i < s.size() && digit(s[i])) ++i, ++exponent_digits;
    if (exponent_digits == 0) return false;
  }
  return i == s.size();
}

}  // namespace

double parse_number(std::string_view text) {
  if (!is_numeric_literal(text)) return 0.0;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc::result_out_of_range) {
    // from_chars leaves value untouched on overflow/underflow.
    return std::strtod(std::string(text).c_str(), nullptr);
  }
  (void)ptr;
  return value;
}

std::string format_number(double value) {
  if (std::isfinite(value) && std::trunc(value) == value && std::fabs(value) < 9007199254740992.0) {
    // -0 prints as 0
    return std::to_string(static_cast<long long>(value));
  }
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  (void)ec;
  return std::string(buffer, ptr);
}

}  // namespace crocopat
