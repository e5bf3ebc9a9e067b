#include "crocopat/bdd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace crocopat::bdd {
namespace {

constexpr Level kFreeLevel = kTerminalLevel - 1;

std::size_t pow2_at_least(std::size_t n) { return std::bit_ceil(std::max<std::size_t>(n, 1)); }

inline std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

inline std::size_t node_hash(Level level, NodeRef low, NodeRef high) {
  return mix((static_cast<std::uint64_t>(level) << 40) ^
             (static_cast<std::uint64_t>(low) << 20) ^ high ^
             (static_cast<std::uint64_t>(high) << 44));
}

}  // namespace

// ---------------------------------------------------------------- Bdd

Bdd::Bdd(Manager& manager, NodeRef ref) : manager_(&manager), ref_(ref) {
  manager_->add_root(ref_);
}

Bdd::Bdd(const Bdd& other) : manager_(other.manager_), ref_(other.ref_) {
  if (manager_) manager_->add_root(ref_);
}

Bdd::Bdd(Bdd&& other) noexcept : manager_(other.manager_), ref_(other.ref_) {
  other.manager_ = nullptr;
  other.ref_ = kFalse;
}

Bdd& Bdd::operator=(const Bdd& other) {
  if (this != &other) {
    if (other.manager_) other.manager_->add_root(other.ref_);
    release();
    manager_ = other.manager_;
    ref_ = other.ref_;
  }
  return *this;
}

Bdd& Bdd::operator=(Bdd&& other) noexcept {
  if (this != &other) {
    release();
    manager_ = other.manager_;
    ref_ = other.ref_;
    other.manager_ = nullptr;
    other.ref_ = kFalse;
  }
  return *this;
}

Bdd::~Bdd() { release(); }

void Bdd::release() {
  if (manager_) manager_->remove_root(ref_);
  manager_ = nullptr;
}

// ---------------------------------------------------------------- Manager

Manager::Manager(std::size_t capacity_nodes) : capacity_(capacity_nodes) {
  if (capacity_ == 0) throw std::invalid_argument("BDD capacity must be positive");
  nodes_.reserve(capacity_ + 2);
  nodes_.push_back({kTerminalLevel, kFalse, kFalse, 0});
  nodes_.push_back({kTerminalLevel, kTrue, kTrue, 0});
  buckets_.assign(pow2_at_least(std::max<std::size_t>(capacity_, 1024)), 0);
  std::size_t cache_size = std::clamp<std::size_t>(pow2_at_least(capacity_ / 2),
                                                   std::size_t{1} << 12, std::size_t{1} << 22);
  cache_.assign(cache_size, CacheEntry{});
}

std::size_t Manager::capacity_for_megabytes(std::size_t megabytes) {
  return megabytes * (std::size_t{1} << 20) / 24;
}

void Manager::add_root(NodeRef n) {
  if (n > kTrue) ++roots_[n];
}

void Manager::remove_root(NodeRef n) {
  if (n <= kTrue) return;
  auto it = roots_.find(n);
  if (it != roots_.end() && --it->second == 0) roots_.erase(it);
}

NodeRef Manager::mk(Level level, NodeRef low, NodeRef high) {
  if (low == high) return low;
  if (!(level < nodes_[low].level && level < nodes_[high].level)) {
    throw std::logic_error("BDD ordering violated: child level not below node level");
  }
  std::size_t bucket = node_hash(level, low, high) & (buckets_.size() - 1);
  for (NodeRef n = buckets_[bucket]; n != 0; n = nodes_[n].next) {
    const Node& node = nodes_[n];
    if (node.level == level && node.low == low && node.high == high) return n;
  }
  NodeRef fresh;
  if (free_list_ != 0) {
    fresh = free_list_;
    free_list_ = nodes_[fresh].next;
    --free_count_;
    nodes_[fresh] = {level, low, high, buckets_[bucket]};
  } else if (nodes_.size() - 2 < capacity_) {
    fresh = static_cast<NodeRef>(nodes_.size());
    nodes_.push_back({level, low, high, buckets_[bucket]});
  } else {
    throw TableFull{};
  }
  buckets_[bucket] = fresh;
  return fresh;
}

void Manager::collect_garbage() {
  ++gc_runs_;
  std::vector<bool> marked(nodes_.size(), false);
  marked[kFalse] = marked[kTrue] = true;
  std::vector<NodeRef> stack;
  for (const auto& [root, count] : roots_) {
    (void)count;
    stack.push_back(root);
  }
  while (!stack.empty()) {
    NodeRef n = stack.back();
    stack.pop_back();
    if (marked[n]) continue;
    marked[n] = true;
    stack.push_back(nodes_[n].low);
    stack.push_back(nodes_[n].high);
  }
  std::fill(buckets_.begin(), buckets_.end(), 0);
  free_list_ = 0;
  free_count_ = 0;
  for (NodeRef n = static_cast<NodeRef>(nodes_.size()) - 1; n > kTrue; --n) {
    Node& node = nodes_[n];
    if (marked[n]) {
      std::size_t bucket = node_hash(node.level, node.low, node.high) & (buckets_.size() - 1);
      node.next = buckets_[bucket];
      buckets_[bucket] = n;
    } else {
      node = {kFreeLevel, kFalse, kFalse, free_list_};
      free_list_ = n;
      ++free_count_;
    }
  }
  std::fill(cache_.begin(), cache_.end(), CacheEntry{});
}

Stats Manager::stats() const {
  Stats s;
  s.total_nodes = capacity_;
  s.free_nodes = capacity_ - live_nodes();
  s.percent_free = static_cast<unsigned>(s.free_nodes * 100 / s.total_nodes);
  return s;
}

// ---------------------------------------------------------------- cache

bool Manager::cache_lookup(Op op, NodeRef a, NodeRef b, NodeRef c, NodeRef& out) const {
  std::size_t slot = mix((static_cast<std::uint64_t>(op) << 58) ^
                         (static_cast<std::uint64_t>(a) << 32) ^ b ^
                         (static_cast<std::uint64_t>(c) << 16)) &
                     (cache_.size() - 1);
  const CacheEntry& e = cache_[slot];
  if (e.op == static_cast<std::uint32_t>(op) && e.a == a && e.b == b && e.c == c) {
    out = e.result;
    return true;
  }
  return false;
}

void Manager::cache_store(Op op, NodeRef a, NodeRef b, NodeRef c, NodeRef result) {
  std::size_t slot = mix((static_cast<std::uint64_t>(op) << 58) ^
                         (static_cast<std::uint64_t>(a) << 32) ^ b ^
                         (static_cast<std::uint64_t>(c) << 16)) &
                     (cache_.size() - 1);
  cache_[slot] = {static_cast<std::uint32_t>(op), a, b, c, result};
}

// ---------------------------------------------------------------- raw ops

NodeRef Manager::apply(Op op, NodeRef a, NodeRef b) {
  switch (op) {
    case Op::And:
      if (a == kFalse || b == kFalse) return kFalse;
      if (a == kTrue || a == b) return b;
      if (b == kTrue) return a;
      if (a > b) std::swap(a, b);
      break;
    case Op::Or:
      if (a == kTrue || b == kTrue) return kTrue;
      if (a == kFalse || a == b) return b;
      if (b == kFalse) return a;
      if (a > b) std::swap(a, b);
      break;
    case Op::Xor:
      if (a == b) return kFalse;
      if (a == kFalse) return b;
      if (b == kFalse) return a;
      if (a == kTrue) return negate(b);
      if (b == kTrue) return negate(a);
      if (a > b) std::swap(a, b);
      break;
    case Op::Diff:
      if (a == kFalse || b == kTrue || a == b) return kFalse;
      if (b == kFalse) return a;
      if (a == kTrue) return negate(b);
      break;
    default:
      throw std::logic_error("apply: not a binary operation");
  }
  NodeRef cached;
  if (cache_lookup(op, a, b, 0, cached)) return cached;
  Level la = nodes_[a].level, lb = nodes_[b].level;
  Level top = std::min(la, lb);
  NodeRef a0 = la == top ? nodes_[a].low : a, a1 = la == top ? nodes_[a].high : a;
  NodeRef b0 = lb == top ? nodes_[b].low : b, b1 = lb == top ? nodes_[b].high : b;
  NodeRef low = apply(op, a0, b0);
  NodeRef high = apply(op, a1, b1);
  NodeRef result = mk(top, low, high);
  cache_store(op, a, b, 0, result);
  return result;
}

NodeRef Manager::negate(NodeRef a) {
  if (a == kFalse) return kTrue;
  if (a == kTrue) return kFalse;
  NodeRef cached;
  if (cache_lookup(Op::Not, a, 0, 0, cached)) return cached;
  NodeRef low = negate(nodes_[a].low);
  NodeRef high = negate(nodes_[a].high);
  NodeRef result = mk(nodes_[a].level, low, high);
  cache_store(Op::Not, a, 0, 0, result);
  return result;
}

NodeRef Manager::exists_rec(NodeRef a, NodeRef cube) {
  if (a <= kTrue) return a;
  Level la = nodes_[a].level;
  while (cube != kTrue && nodes_[cube].level < la) cube = nodes_[cube].high;
  if (cube == kTrue) return a;
  NodeRef cached;
  if (cache_lookup(Op::Exists, a, cube, 0, cached)) return cached;
  NodeRef result;
  if (nodes_[cube].level == la) {
    NodeRef rest = nodes_[cube].high;
    NodeRef low = exists_rec(nodes_[a].low, rest);
    if (low == kTrue) {
      result = kTrue;
    } else {
      NodeRef high = exists_rec(nodes_[a].high, rest);
      result = apply(Op::Or, low, high);
    }
  } else {
    NodeRef low = exists_rec(nodes_[a].low, cube);
    NodeRef high = exists_rec(nodes_[a].high, cube);
    result = mk(la, low, high);
  }
  cache_store(Op::Exists, a, cube, 0, result);
  return result;
}

NodeRef Manager::and_exists_rec(NodeRef a, NodeRef b, NodeRef cube) {
  if (a == kFalse || b == kFalse) return kFalse;
  if (a == kTrue && b == kTrue) return kTrue;
  if (cube == kTrue) return apply(Op::And, a, b);
  if (a == kTrue || a == b) return exists_rec(b, cube);
  if (b == kTrue) return exists_rec(a, cube);
  if (a > b) std::swap(a, b);
  Level la = nodes_[a].level, lb = nodes_[b].level;
  Level top = std::min(la, lb);
  while (cube != kTrue && nodes_[cube].level < top) cube = nodes_[cube].high;
  if (cube == kTrue) return apply(Op::And, a, b);
  NodeRef cached;
  if (cache_lookup(Op::AndExists, a, b, cube, cached)) return cached;
  NodeRef a0 = la == top ? nodes_[a].low : a, a1 = la == top ? nodes_[a].high : a;
  NodeRef b0 = lb == top ? nodes_[b].low : b, b1 = lb == top ? nodes_[b].high : b;
  NodeRef result;
  if (nodes_[cube].level == top) {
    NodeRef rest = nodes_[cube].high;
    NodeRef low = and_exists_rec(a0, b0, rest);
    if (low == kTrue) {
      result = kTrue;
    } else {
      NodeRef high = and_exists_rec(a1, b1, rest);
      result = apply(Op::Or, low, high);
    }
  } else {
    NodeRef low = and_exists_rec(a0, b0, cube);
    NodeRef high = and_exists_rec(a1, b1, cube);
    result = mk(top, low, high);
  }
  cache_store(Op::AndExists, a, b, cube, result);
  return result;
}

NodeRef Manager::restrict_rec(NodeRef a, NodeRef cube) {
  if (a <= kTrue || cube == kTrue) return a;
  Level la = nodes_[a].level;
  auto next = [&](NodeRef c) { return nodes_[c].low == kFalse ? nodes_[c].high : nodes_[c].low; };
  while (cube != kTrue && nodes_[cube].level < la) cube = next(cube);
  if (cube == kTrue) return a;
  NodeRef cached;
  if (cache_lookup(Op::Restrict, a, cube, 0, cached)) return cached;
  NodeRef result;
  if (nodes_[cube].level == la) {
    bool value = nodes_[cube].low == kFalse;
    result = restrict_rec(value ? nodes_[a].high : nodes_[a].low, next(cube));
  } else {
    NodeRef low = restrict_rec(nodes_[a].low, cube);
    NodeRef high = restrict_rec(nodes_[a].high, cube);
    result = mk(la, low, high);
  }
  cache_store(Op::Restrict, a, cube, 0, result);
  return result;
}

NodeRef Manager::positive_cube(std::span<const Level> levels) {
  std::vector<Level> sorted(levels.begin(), levels.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  NodeRef r = kTrue;
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) r = mk(*it, kFalse, r);
  return r;
}

NodeRef Manager::swap_adjacent(NodeRef a, Level upper, Level lower,
                               std::unordered_map<NodeRef, NodeRef>& memo) {
  if (a <= kTrue) return a;
  Level la = nodes_[a].level;
  if (la > lower) return a;
  if (auto it = memo.find(a); it != memo.end()) return it->second;
  NodeRef result;
  if (la < upper) {
    NodeRef low = swap_adjacent(nodes_[a].low, upper, lower, memo);
    NodeRef high = swap_adjacent(nodes_[a].high, upper, lower, memo);
    result = mk(la, low, high);
  } else {
    auto cof = [&](NodeRef f, Level l, bool v) {
      if (f > kTrue && nodes_[f].level == l) return v ? nodes_[f].high : nodes_[f].low;
      return f;
    };
    NodeRef f0 = cof(a, upper, false), f1 = cof(a, upper, true);
    NodeRef f00 = cof(f0, lower, false), f01 = cof(f0, lower, true);
    NodeRef f10 = cof(f1, lower, false), f11 = cof(f1, lower, true);
    // g(upper = p, lower = q) = f(upper = q, lower = p)
    NodeRef low = mk(lower, f00, f10);
    NodeRef high = mk(lower, f01, f11);
    result = mk(upper, low, high);
  }
  memo.emplace(a, result);
  return result;
}

// ---------------------------------------------------------------- handle API

Bdd Manager::var(Level level) {
  return guarded([&] { return mk(level, kFalse, kTrue); });
}

Bdd Manager::make(Level level, const Bdd& low, const Bdd& high) {
  return guarded([&] { return mk(level, low.ref(), high.ref()); });
}

Bdd Manager::apply_and(const Bdd& a, const Bdd& b) {
  return guarded([&] { return apply(Op::And, a.ref(), b.ref()); });
}

Bdd Manager::apply_or(const Bdd& a, const Bdd& b) {
  return guarded([&] { return apply(Op::Or, a.ref(), b.ref()); });
}

Bdd Manager::apply_xor(const Bdd& a, const Bdd& b) {
  return guarded([&] { return apply(Op::Xor, a.ref(), b.ref()); });
}

Bdd Manager::apply_diff(const Bdd& a, const Bdd& b) {
  return guarded([&] { return apply(Op::Diff, a.ref(), b.ref()); });
}

Bdd Manager::apply_not(const Bdd& a) {
  return guarded([&] { return negate(a.ref()); });
}

Bdd Manager::exists(const Bdd& a, std::span<const Level> levels) {
  if (levels.empty()) return a;
  Bdd cube = guarded([&] { return positive_cube(levels); });
  return guarded([&] { return exists_rec(a.ref(), cube.ref()); });
}

Bdd Manager::forall(const Bdd& a, std::span<const Level> levels) {
  return apply_not(exists(apply_not(a), levels));
}

Bdd Manager::and_exists(const Bdd& a, const Bdd& b, std::span<const Level> levels) {
  Bdd cube = guarded([&] { return positive_cube(levels); });
  return guarded([&] { return and_exists_rec(a.ref(), b.ref(), cube.ref()); });
}

Bdd Manager::cube(std::span<const Level> levels, const std::vector<bool>& values) {
  if (levels.size() != values.size()) throw std::invalid_argument("cube: size mismatch");
  std::vector<std::pair<Level, bool>> literals;
  for (std::size_t i = 0; i < levels.size(); ++i) literals.emplace_back(levels[i], values[i]);
  std::sort(literals.begin(), literals.end());
  return guarded([&] {
    NodeRef r = kTrue;
    for (auto it = literals.rbegin(); it != literals.rend(); ++it) {
      r = it->second ? mk(it->first, kFalse, r) : mk(it->first, r, kFalse);
    }
    return r;
  });
}

Bdd Manager::restrict(const Bdd& a, std::span<const Level> levels,
                      const std::vector<bool>& values) {
  if (levels.empty()) return a;
  Bdd c = cube(levels, values);
  return guarded([&] { return restrict_rec(a.ref(), c.ref()); });
}

Bdd Manager::rename(const Bdd& a, const std::vector<std::pair<Level, Level>>& map) {
  std::vector<Level> supp = support(a);
  std::vector<Level> target(supp.size());
  for (std::size_t i = 0; i < supp.size(); ++i) {
    target[i] = supp[i];
    for (const auto& [from, to] : map) {
      if (from == supp[i]) target[i] = to;
    }
  }
  std::vector<Level> sorted_target = target;
  std::sort(sorted_target.begin(), sorted_target.end());
  if (std::adjacent_find(sorted_target.begin(), sorted_target.end()) != sorted_target.end()) {
    throw std::logic_error("rename: level map is not injective on the support");
  }

  Bdd current = a;
  if (sorted_target != target) {
    // Permute variables among the support positions with adjacent swaps
    // until position j holds the variable whose target has rank j.
    std::vector<std::size_t> want(supp.size());
    for (std::size_t j = 0; j < supp.size(); ++j) {
      want[j] = static_cast<std::size_t>(
          std::lower_bound(sorted_target.begin(), sorted_target.end(), target[j]) -
          sorted_target.begin());
    }
    for (std::size_t pass = 0; pass + 1 < want.size(); ++pass) {
      bool swapped = false;
      for (std::size_t j = 0; j + 1 < want.size() - pass; ++j) {
        if (want[j] > want[j + 1]) {
          current = guarded([&] {
            std::unordered_map<NodeRef, NodeRef> memo;
            return swap_adjacent(current.ref(), supp[j], supp[j + 1], memo);
          });
          std::swap(want[j], want[j + 1]);
          swapped = true;
        }
      }
      if (!swapped) break;
    }
    target = sorted_target;
  }
  if (target == supp) return current;

  return guarded([&] {
    std::unordered_map<NodeRef, NodeRef> memo;
    std::function<NodeRef(NodeRef)> rec = [&](NodeRef n) -> NodeRef {
      if (n <= kTrue) return n;
      if (auto it = memo.find(n); it != memo.end()) return it->second;
      auto pos = std::lower_bound(supp.begin(), supp.end(), nodes_[n].level) - supp.begin();
      NodeRef low = rec(nodes_[n].low);
      NodeRef high = rec(nodes_[n].high);
      NodeRef r = mk(target[static_cast<std::size_t>(pos)], low, high);
      memo.emplace(n, r);
      return r;
    };
    return rec(current.ref());
  });
}

double Manager::sat_count(const Bdd& a, std::span<const Level> levels) {
  std::vector<Level> sorted(levels.begin(), levels.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const auto k = sorted.size();
  auto position = [&](NodeRef n) -> std::size_t {
    if (n <= kTrue) return k;
    auto it = std::lower_bound(sorted.begin(), sorted.end(), nodes_[n].level);
    if (it == sorted.end() || *it != nodes_[n].level) {
      throw std::logic_error("sat_count: BDD depends on a level outside the counted set");
    }
    return static_cast<std::size_t>(it - sorted.begin());
  };
  std::unordered_map<NodeRef, double> memo;
  std::function<double(NodeRef)> count = [&](NodeRef n) -> double {
    if (n == kFalse) return 0.0;
    if (n == kTrue) return 1.0;
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    std::size_t p = position(n);
    NodeRef lo = nodes_[n].low, hi = nodes_[n].high;
    double c = std::ldexp(count(lo), static_cast<int>(position(lo) - p - 1)) +
               std::ldexp(count(hi), static_cast<int>(position(hi) - p - 1));
    memo.emplace(n, c);
    return c;
  };
  return std::ldexp(count(a.ref()), static_cast<int>(position(a.ref())));
}

std::size_t Manager::node_count(const Bdd& a) const {
  std::unordered_set<NodeRef> seen;
  std::vector<NodeRef> stack{a.ref()};
  while (!stack.empty()) {
    NodeRef n = stack.back();
    stack.pop_back();
    if (n <= kTrue || !seen.insert(n).second) continue;
    stack.push_back(nodes_[n].low);
    stack.push_back(nodes_[n].high);
  }
  return seen.size();
}

std::vector<Level> Manager::support(const Bdd& a) const {
  std::unordered_set<NodeRef> seen;
  std::vector<Level> levels;
  std::vector<NodeRef> stack{a.ref()};
  while (!stack.empty()) {
    NodeRef n = stack.back();
    stack.pop_back();
    if (n <= kTrue || !seen.insert(n).second) continue;
    levels.push_back(nodes_[n].level);
    stack.push_back(nodes_[n].low);
    stack.push_back(nodes_[n].high);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

void Manager::for_each_sat(const Bdd& a, std::span<const Level> levels,
                           const std::function<void(const std::vector<bool>&)>& fn) const {
  std::vector<bool> bits(levels.size());
  std::function<void(NodeRef, std::size_t)> walk = [&](NodeRef n, std::size_t i) {
    if (n == kFalse) return;
    if (i == levels.size()) {
      if (n != kTrue) {
        throw std::logic_error("for_each_sat: BDD depends on a level outside the enumerated set");
      }
      fn(bits);
      return;
    }
    if (n != kTrue && nodes_[n].level < levels[i]) {
      throw std::logic_error("for_each_sat: BDD depends on a level outside the enumerated set");
    }
    bool here = n != kTrue && nodes_[n].level == levels[i];
    bits[i] = false;
    walk(here ? nodes_[n].low : n, i + 1);
    bits[i] = true;
    walk(here ? nodes_[n].high : n, i + 1);
  };
  walk(a.ref(), 0);
}

Bdd Manager::from_sorted_rows(std::span<const Level> levels, std::size_t rows,
                              const std::function<bool(std::size_t, std::size_t)>& bit) {
  return guarded([&] {
    std::function<NodeRef(std::size_t, std::size_t, std::size_t)> rec =
        [&](std::size_t lo, std::size_t hi, std::size_t i) -> NodeRef {
      if (lo == hi) return kFalse;
      if (i == levels.size()) return kTrue;
      std::size_t a = lo, b = hi;  // first row in [lo, hi) with bit i set
      while (a < b) {
        std::size_t mid = a + (b - a) / 2;
        if (bit(mid, i)) b = mid; else a = mid + 1;
      }
      NodeRef low = rec(lo, a, i + 1);
      NodeRef high = rec(a, hi, i + 1);
      return mk(levels[i], low, high);
    };
    return rec(0, rows, 0);
  });
}

}  // namespace crocopat::bdd
