#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "crocopat/bdd.hpp"
#include "crocopat/universe.hpp"

// Relations over the universe as BDDs.
//
// Every attribute occupies one block of `bits()` consecutive BDD levels,
// most significant bit first, so the unsigned order of a block equals the
// lexicographic order of the strings. Block k starts at level k * bits().
// Stored relations use blocks 0..n-1 for the internal attributes i1..in;
// during one statement, user attributes get blocks in first-encounter order.
namespace crocopat {

struct Attribute {
  std::string name;
  unsigned slot = 0;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// A relation value. `attributes` is ordered by slot (the BDD order), and the
/// root depends only on those blocks and accepts only in-universe indices.
struct Relation {
  std::vector<Attribute> attributes;
  bdd::Bdd root;

  std::size_t arity() const { return attributes.size(); }
  std::vector<std::string> attribute_names() const;
};

/// Slot assignment for the user attributes of one statement.
class AttributeOrderLog {
 public:
  /// Slot of `name`, assigning the next free slot on first encounter.
  unsigned slot_of(const std::string& name);
  std::optional<unsigned> find(const std::string& name) const;
  /// A fresh slot not bound to any name.
  unsigned scratch() { return next_++; }
  const std::vector<std::string>& order() const { return order_; }

 private:
  std::unordered_map<std::string, unsigned> slots_;
  std::vector<std::string> order_;
  unsigned next_ = 0;
};

struct Term {
  enum class Kind { Attribute, Anonymous, Constant };
  Kind kind = Kind::Anonymous;
  std::string text;  // attribute name or constant string

  static Term attribute(std::string name) { return {Kind::Attribute, std::move(name)}; }
  static Term anonymous() { return {Kind::Anonymous, {}}; }
  static Term constant(std::string value) { return {Kind::Constant, std::move(value)}; }
};

enum class Comparison { Eq, Ne, Lt, Le, Gt, Ge };
enum class Connective { And, Or, Implies, Iff };
enum class Aggregate { Min, Max, Sum, Avg };

Comparison converse(Comparison c);
bool compare_numbers(Comparison c, double a, double b);

struct RelInfo {
  double tuples = 0;
  std::size_t universe_size = 0;
  std::size_t bdd_nodes = 0;
  bdd::Stats stats;
  std::vector<std::string> attribute_order;
};

/// The five-line RELINFO block, each line newline-terminated.
std::string format_relinfo(const RelInfo& info);

class RelationEngine {
 public:
  RelationEngine(bdd::Manager& manager, Universe universe);

  const Universe& universe() const { return universe_; }
  bdd::Manager& manager() { return manager_; }
  unsigned bits() const { return universe_.bits(); }

  std::vector<bdd::Level> levels(unsigned slot) const;
  std::vector<bdd::Level> levels(const std::vector<Attribute>& attributes) const;

  /// Indices 0..|U|-1 in the block of `slot`.
  bdd::Bdd domain(unsigned slot);

  // Stored relations (internal attributes i1..in on slots 0..n-1).
  Relation stored(std::size_t arity, bdd::Bdd root) const;
  Relation empty(std::size_t arity);
  Relation full(std::size_t arity);
  /// Tuples of universe strings; throws RuntimeError for a string outside
  /// the universe or a tuple of the wrong arity.
  Relation from_tuples(std::size_t arity, const std::vector<std::vector<std::string>>& tuples);

  Relation boolean(bool value);

  /// rel_var(term, ...) against the stored value `stored`.
  Relation atom(const Relation& stored, std::span<const Term> terms, AttributeOrderLog& log);
  Relation predefined(bool truth, std::span<const Term> terms, AttributeOrderLog& log);
  Relation lexicographic(Comparison op, Term left, Term right, AttributeOrderLog& log);
  Relation regex(const std::string& pattern, const Term& term, AttributeOrderLog& log);

  Relation combine(Connective op, const Relation& a, const Relation& b);
  Relation negate(const Relation& a);
  Relation exists(const std::vector<std::string>& names, const Relation& a);
  Relation forall(const std::vector<std::string>& names, const Relation& a);
  /// exists(names, a & b) in one pass.
  Relation and_exists(const std::vector<std::string>& names, const Relation& a, const Relation& b);

  /// Warshall-style closure over pivot elements; binary intermediates only.
  Relation transitive_closure(const Relation& a, const std::string& source,
                              const std::string& target);
  /// Repeated self-composition until the fixed point.
  Relation transitive_closure_squaring(const Relation& a, const std::string& source,
                                       const std::string& target, AttributeOrderLog& log);

  /// TRUE() or FALSE(); operands are compared over the union of their attributes.
  Relation compare(Comparison op, const Relation& a, const Relation& b);

  double cardinality(const Relation& a);
  double aggregate(Aggregate kind, const Relation& a);

  /// Visits tuples (universe indices in attribute order) lexicographically.
  void for_each_tuple(const Relation& a,
                      const std::function<void(const std::vector<std::size_t>&)>& fn);
  std::vector<std::vector<std::size_t>> enumerate(const Relation& a);
  std::vector<std::vector<std::string>> enumerate_strings(const Relation& a);

  /// New stored value of a relation variable after `lhs := value`. String
  /// constants on the left replace only the matching slice of `old`.
  Relation assign(const Relation* old, std::span<const Term> lhs, const Relation& value);

  RelInfo relinfo(const Relation& a);

 private:
  bdd::Bdd block_equal(unsigned upper, unsigned lower);
  const bdd::Bdd& comparison_bdd(Comparison op);
  Relation pad(const Relation& a, const std::vector<Attribute>& attributes);
  std::vector<Attribute> merge(const std::vector<Attribute>& a, const std::vector<Attribute>& b) const;
  bdd::Bdd domain_of(const std::vector<Attribute>& attributes);
  std::vector<bdd::Level> levels_of_names(const Relation& a, const std::vector<std::string>& names) const;
  std::vector<std::size_t> unary_members(const bdd::Bdd& root, unsigned slot);

  bdd::Manager& manager_;
  Universe universe_;
  std::vector<std::optional<bdd::Bdd>> domains_;
  std::vector<std::optional<bdd::Bdd>> full_;
  std::map<Comparison, bdd::Bdd> comparisons_;
  std::unordered_map<std::string, bdd::Bdd> regexes_;
};

}  // namespace crocopat
