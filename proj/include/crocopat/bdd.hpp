#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crocopat/error.hpp"

// Reduced ordered BDDs in a fixed-capacity, hash-consed node arena.
//
// Level 0 is the topmost variable. Two terminals (no complement edges).
// Handles (`Bdd`) are the GC roots; when the arena is full a mark-and-sweep
// over the live handles runs and the failed operation is restarted once.
namespace crocopat::bdd {

using NodeRef = std::uint32_t;
using Level = std::uint32_t;

inline constexpr NodeRef kFalse = 0;
inline constexpr NodeRef kTrue = 1;
inline constexpr Level kTerminalLevel = std::numeric_limits<Level>::max();

class OutOfMemory : public Error {
 public:
  OutOfMemory() : Error("BDD package out of memory.") {}
};

class Manager;

/// Owning reference to a node. Equality is node identity, which by
/// canonicity is equality of the represented functions.
class Bdd {
 public:
  Bdd() = default;
  Bdd(Manager& manager, NodeRef ref);
  Bdd(const Bdd& other);
  Bdd(Bdd&& other) noexcept;
  Bdd& operator=(const Bdd& other);
  Bdd& operator=(Bdd&& other) noexcept;
  ~Bdd();

  NodeRef ref() const { return ref_; }
  Manager* manager() const { return manager_; }
  bool is_false() const { return ref_ == kFalse; }
  bool is_true() const { return ref_ == kTrue; }

  friend bool operator==(const Bdd& a, const Bdd& b) { return a.ref_ == b.ref_; }

 private:
  void release();

  Manager* manager_ = nullptr;
  NodeRef ref_ = kFalse;
};

struct Stats {
  std::size_t free_nodes = 0;
  std::size_t total_nodes = 0;
  unsigned percent_free = 0;  // floor(100 * free / total)
};

class Manager {
 public:
  explicit Manager(std::size_t capacity_nodes);
  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;

  /// floor(megabytes * 2^20 / 24): roughly 24 bytes per node including its
  /// share of the unique table.
  static std::size_t capacity_for_megabytes(std::size_t megabytes);

  Bdd constant(bool value) { return Bdd(*this, value ? kTrue : kFalse); }
  Bdd var(Level level);
  /// Hash-consed node constructor; returns `low` when low == high.
  Bdd make(Level level, const Bdd& low, const Bdd& high);

  Bdd apply_and(const Bdd& a, const Bdd& b);
  Bdd apply_or(const Bdd& a, const Bdd& b);
  Bdd apply_xor(const Bdd& a, const Bdd& b);
  /// a & !b
  Bdd apply_diff(const Bdd& a, const Bdd& b);
  Bdd apply_not(const Bdd& a);

  Bdd exists(const Bdd& a, std::span<const Level> levels);
  Bdd forall(const Bdd& a, std::span<const Level> levels);
  /// exists(levels, a & b) without building the conjunction.
  Bdd and_exists(const Bdd& a, const Bdd& b, std::span<const Level> levels);
  /// Cofactor: fixes each level to the matching value.
  Bdd restrict(const Bdd& a, std::span<const Level> levels, const std::vector<bool>& values);

  /// Conjunction of literals (a single path to TRUE).
  Bdd cube(std::span<const Level> levels, const std::vector<bool>& values);

  /// Moves every node at level l to map(l); unmapped levels stay put. The
  /// map must be injective on the support of `a`. Order-preserving maps take
  /// one traversal; others are carried out as adjacent-variable swaps.
  Bdd rename(const Bdd& a, const std::vector<std::pair<Level, Level>>& map);

  /// Number of assignments to `levels` satisfying `a`; `levels` must cover
  /// the support of `a`.
  double sat_count(const Bdd& a, std::span<const Level> levels);
  /// Internal (non-terminal) nodes reachable from `a`.
  std::size_t node_count(const Bdd& a) const;
  std::vector<Level> support(const Bdd& a) const;

  /// Calls `fn` for each satisfying assignment of the sorted `levels`, in
  /// ascending order of the bit string (level order, 0 before 1).
  void for_each_sat(const Bdd& a, std::span<const Level> levels,
                    const std::function<void(const std::vector<bool>&)>& fn) const;

  /// Builds a BDD from assignment rows given in strictly ascending bit-string
  /// order over the sorted `levels`. `bit(row, i)` returns row's value at levels[i].
  Bdd from_sorted_rows(std::span<const Level> levels, std::size_t rows,
                       const std::function<bool(std::size_t, std::size_t)>& bit);

  Stats stats() const;
  std::size_t capacity() const { return capacity_; }
  std::size_t live_nodes() const { return nodes_.size() - 2 - free_count_; }
  std::size_t gc_runs() const { return gc_runs_; }
  std::size_t root_count() const { return roots_.size(); }
  void collect_garbage();

  Level level_of(NodeRef n) const { return nodes_[n].level; }
  NodeRef low_of(NodeRef n) const { return nodes_[n].low; }
  NodeRef high_of(NodeRef n) const { return nodes_[n].high; }

  // Raw construction for callers that build larger structures in one go.
  // `fn(*this)` returns a NodeRef built with mk()/raw_*(); intermediate
  // refs are not GC roots, so the whole builder reruns after a collection.
  template <typename Fn>
  Bdd build(Fn&& fn) {
    return guarded([&] { return fn(*this); });
  }
  NodeRef mk(Level level, NodeRef low, NodeRef high);
  NodeRef raw_and(NodeRef a, NodeRef b) { return apply(Op::And, a, b); }
  NodeRef raw_or(NodeRef a, NodeRef b) { return apply(Op::Or, a, b); }
  NodeRef raw_diff(NodeRef a, NodeRef b) { return apply(Op::Diff, a, b); }
  NodeRef raw_not(NodeRef a) { return negate(a); }

 private:
  friend class Bdd;

  enum class Op : std::uint32_t { And = 1, Or, Xor, Diff, Not, Exists, AndExists, Restrict };

  struct Node {
    Level level;
    NodeRef low;
    NodeRef high;
    NodeRef next;  // unique-table chain, or free list
  };

  struct CacheEntry {
    std::uint32_t op = 0;
    NodeRef a = 0, b = 0, c = 0;
    NodeRef result = 0;
  };

  /// Thrown internally when the arena is full; turned into GC + retry.
  struct TableFull {};

  template <typename Fn>
  Bdd guarded(Fn&& fn) {
    for (int attempt = 0;; ++attempt) {
      try {
        return Bdd(*this, fn());
      } catch (const TableFull&) {
        if (attempt > 0) throw OutOfMemory();
        collect_garbage();
      }
    }
  }

  NodeRef apply(Op op, NodeRef a, NodeRef b);
  NodeRef negate(NodeRef a);
  NodeRef exists_rec(NodeRef a, NodeRef cube);
  NodeRef and_exists_rec(NodeRef a, NodeRef b, NodeRef cube);
  NodeRef restrict_rec(NodeRef a, NodeRef cube);
  NodeRef positive_cube(std::span<const Level> levels);
  NodeRef swap_adjacent(NodeRef a, Level upper, Level lower,
                        std::unordered_map<NodeRef, NodeRef>& memo);

  bool cache_lookup(Op op, NodeRef a, NodeRef b, NodeRef c, NodeRef& out) const;
  void cache_store(Op op, NodeRef a, NodeRef b, NodeRef c, NodeRef result);

  void add_root(NodeRef n);
  void remove_root(NodeRef n);

  std::size_t capacity_;
  std::vector<Node> nodes_;
  std::vector<NodeRef> buckets_;
  NodeRef free_list_ = 0;  // 0 = empty (terminal 0 is never free)
  std::size_t free_count_ = 0;
  std::vector<CacheEntry> cache_;
  std::unordered_map<NodeRef, std::uint32_t> roots_;
  std::size_t gc_runs_ = 0;
};

}  // namespace crocopat::bdd
