#include "crocopat/rsf.hpp"

#include <istream>
#include <sstream>
#include <unordered_set>

#include "crocopat/error.hpp"
#include "crocopat/keywords.hpp"

namespace crocopat::rsf {
namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::string tuple_key(const Tuple& t) {
  // NUL cannot occur in a line-oriented text element, so it separates safely.
  std::string key = t.relation;
  for (const auto& e : t.elements) {
    key.push_back('\0');
    key += e.text;
  }
  return key;
}

Tuple parse_line(std::string_view line, int line_no) {
  auto fail = [&](const std::string& what) {
    throw RsfError("RSF line " + std::to_string(line_no) + ": " + what, {line_no, 0});
  };
  Tuple tuple;
  std::size_t i = 0;
  auto skip_blanks = [&] {
    while (i < line.size() && is_blank(line[i])) ++i;
  };
  skip_blanks();
  std::size_t start = i;
  while (i < line.size() && !is_blank(line[i])) ++i;
  tuple.relation = std::string(line.substr(start, i - start));
  if (!is_identifier(tuple.relation)) {
    fail("relation name '" + tuple.relation + "' is not an identifier");
  }
  for (;;) {
    skip_blanks();
    if (i >= line.size()) break;
    Element element;
    if (line[i] == '"') {
      std::size_t close = line.find('"', i + 1);
      if (close == std::string_view::npos) fail("unterminated quoted element");
      element.text = std::string(line.substr(i + 1, close - i - 1));
      element.quoted = true;
      i = close + 1;
      if (i < line.size() && !is_blank(line[i])) {
        fail("whitespace expected after closing quote");
      }
    } else {
      start = i;
      while (i < line.size() && !is_blank(line[i])) ++i;
      element.text = std::string(line.substr(start, i - start));
    }
    tuple.elements.push_back(std::move(element));
  }
  return tuple;
}

}  // namespace

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto letter = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!letter(text.front())) return false;
  for (char c : text) {
    if (!letter(c) && !(c >= '0' && c <= '9')) return false;
  }
  return !is_keyword(text);
}

Stream parse(std::istream& in) {
  Stream stream;
  std::unordered_set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '.') {
      stream.terminated_by_dot = true;
      break;
    }
    if (!line.empty() && line.front() == '#') continue;
    bool blank = true;
    for (char c : line) blank = blank && is_blank(c);
    if (blank) continue;
    Tuple tuple = parse_line(line, line_no);
    if (seen.insert(tuple_key(tuple)).second) {
      stream.tuples.push_back(std::move(tuple));
    }
  }
  return stream;
}

Stream parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse(in);
}

std::string serialize_tuple(const std::optional<std::string>& prefix,
                            const std::vector<Element>& elements) {
  std::string out;
  if (prefix) out = *prefix;
  bool first = !prefix.has_value();
  for (const auto& e : elements) {
    if (e.text.find_first_of("\r\n") != std::string::npos) {
      throw RsfError("cannot write tuple element containing a line break");
    }
    if (!first) out.push_back(' ');
    first = false;
    bool quote = e.quoted || e.text.empty() ||
                 e.text.find_first_of(" \t") != std::string::npos;
    if (quote) {
      out.push_back('"');
      out += e.text;
      out.push_back('"');
    } else {
      out += e.text;
    }
  }
  out.push_back('\n');
  return out;
}

Universe collect_universe(const Stream& stream, const std::set<std::string>& literals) {
  std::vector<std::string> strings;
  std::vector<bool> quoted;
  for (const auto& t : stream.tuples) {
    for (const auto& e : t.elements) {
      strings.push_back(e.text);
      quoted.push_back(e.quoted);
    }
  }
  for (const auto& s : literals) {
    strings.push_back(s);
    quoted.push_back(false);
  }
  return Universe(std::move(strings), std::move(quoted));
}

}  // namespace crocopat::rsf
