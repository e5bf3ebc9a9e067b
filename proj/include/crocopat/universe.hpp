#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crocopat {

/// The fixed, lexicographically ordered set of strings every relation ranges
/// over. Index order equals byte-wise lexicographic order.
class Universe {
 public:
  Universe() = default;
  /// `strings` may be unsorted and contain duplicates; flags are OR-merged.
  Universe(std::vector<std::string> strings, std::vector<bool> quoted);

  std::size_t size() const { return strings_.size(); }
  bool empty() const { return strings_.empty(); }

  /// ceil(log2(size)), at least 1.
  unsigned bits() const { return bits_; }

  const std::string& at(std::size_t index) const { return strings_.at(index); }
  bool quoted(std::size_t index) const { return quoted_.at(index); }
  std::optional<std::size_t> index_of(std::string_view s) const;
  bool contains(std::string_view s) const { return index_of(s).has_value(); }

  const std::vector<std::string>& strings() const { return strings_; }

  /// Big-endian binary of index_of(s) with bits() digits; nullopt if s is
  /// not in the universe.
  std::optional<std::vector<bool>> encode(std::string_view s) const;

  friend bool operator==(const Universe&, const Universe&) = default;

 private:
  std::vector<std::string> strings_;
  std::vector<bool> quoted_;
  unsigned bits_ = 1;
};

}  // namespace crocopat
