#include "crocopat/universe.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace crocopat {

Universe::Universe(std::vector<std::string> strings, std::vector<bool> quoted) {
  if (quoted.size() != strings.size()) {
    throw std::invalid_argument("Universe: one quote flag per string required");
  }
  std::vector<std::size_t> order(strings.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return strings[a] < strings[b];
  });
  for (std::size_t i : order) {
    if (!strings_.empty() && strings_.back() == strings[i]) {
      if (quoted[i]) quoted_.back() = true;
      continue;
    }
    strings_.push_back(std::move(strings[i]));
    quoted_.push_back(quoted[i]);
  }
  bits_ = 1;
  while ((std::size_t{1} << bits_) < strings_.size()) ++bits_;
}

std::optional<std::size_t> Universe::index_of(std::string_view s) const {
  auto it = std::lower_bound(strings_.begin(), strings_.end(), s,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == strings_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - strings_.begin());
}

std::optional<std::vector<bool>> Universe::encode(std::string_view s) const {
  auto index = index_of(s);
  if (!index) return std::nullopt;
  std::vector<bool> out(bits_);
  for (unsigned b = 0; b < bits_; ++b) {
    out[b] = ((*index >> (bits_ - 1 - b)) & 1U) != 0;
  }
  return out;
}

}  // namespace crocopat
