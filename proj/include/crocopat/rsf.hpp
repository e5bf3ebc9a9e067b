#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crocopat/universe.hpp"

namespace crocopat::rsf {

struct Element {
  std::string text;
  bool quoted = false;

  friend bool operator==(const Element&, const Element&) = default;
};

struct Tuple {
  std::string relation;
  std::vector<Element> elements;
};

struct Stream {
  std::vector<Tuple> tuples;  // first-occurrence order, duplicates removed
  bool terminated_by_dot = false;
};

/// Reads RSF lines until end of input or a line starting with '.'.
/// Throws RsfError (with the line number) on malformed lines.
Stream parse(std::istream& in);
Stream parse(std::string_view text);

/// One RSF line including the trailing newline. Elements are quoted when
/// flagged, empty, or containing whitespace. Throws RsfError for elements
/// containing a line break.
std::string serialize_tuple(const std::optional<std::string>& prefix,
                            const std::vector<Element>& elements);

/// Sorted, deduplicated union of all tuple elements and the given literals.
Universe collect_universe(const Stream& stream,
                          const std::set<std::string>& literals);

bool is_identifier(std::string_view text);

}  // namespace crocopat::rsf
