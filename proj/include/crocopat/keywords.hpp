#pragma once

#include <algorithm>
#include <array>
#include <string_view>

namespace crocopat {

inline constexpr std::array<std::string_view, 24> kKeywords = {
    "AVG",  "DIV",  "ELSE",  "ENDL",   "EX",     "EXEC", "EXIT",    "FA",
    "FOR",  "IF",   "IN",    "MAX",    "MIN",    "MOD",  "NUMBER",  "PRINT",
    "RELINFO", "STDERR", "STRING", "SUM", "TC",   "TCFAST", "TO",   "WHILE"};

inline bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

}  // namespace crocopat
