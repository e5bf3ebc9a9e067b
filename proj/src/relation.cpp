#include "crocopat/relation.hpp"

#include <regex.h>

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "crocopat/error.hpp"
#include "crocopat/numbers.hpp"

namespace crocopat {

using bdd::Bdd;
using bdd::kFalse;
using bdd::kTrue;
using bdd::Level;
using bdd::NodeRef;

namespace {

NodeRef less_than(bdd::Manager& m, const std::vector<Level>& block, std::size_t bound) {
  const std::size_t k = block.size();
  if (k < 64 && bound >= (std::size_t{1} << k)) return kTrue;
  if (bound == 0) return kFalse;
  NodeRef r = kFalse;
  for (std::size_t i = k; i-- > 0;) {
    bool bit = ((bound >> (k - 1 - i)) & 1U) != 0;
    r = bit ? m.mk(block[i], kTrue, r) : m.mk(block[i], r, kFalse);
  }
  return r;
}

NodeRef index_range(bdd::Manager& m, const std::vector<Level>& block, std::size_t lo,
                    std::size_t hi) {
  if (lo >= hi) return kFalse;
  return m.raw_diff(less_than(m, block, hi), less_than(m, block, lo));
}

}  // namespace

std::vector<std::string> Relation::attribute_names() const {
  std::vector<std::string> names;
  for (const auto& a : attributes) names.push_back(a.name);
  return names;
}

unsigned AttributeOrderLog::slot_of(const std::string& name) {
  if (auto it = slots_.find(name); it != slots_.end()) return it->second;
  unsigned slot = next_++;
  slots_.emplace(name, slot);
  order_.push_back(name);
  return slot;
}

std::optional<unsigned> AttributeOrderLog::find(const std::string& name) const {
  if (auto it = slots_.find(name); it != slots_.end()) return it->second;
  return std::nullopt;
}

Comparison converse(Comparison c) {
  switch (c) {
    case Comparison::Lt: return Comparison::Gt;
    case Comparison::Le: return Comparison::Ge;
    case Comparison::Gt: return Comparison::Lt;
    case Comparison::Ge: return Comparison::Le;
    default: return c;
  }
}

bool compare_numbers(Comparison c, double a, double b) {
  switch (c) {
    case Comparison::Eq: return a == b;
    case Comparison::Ne: return a != b;
    case Comparison::Lt: return a < b;
    case Comparison::Le: return a <= b;
    case Comparison::Gt: return a > b;
    case Comparison::Ge: return a >= b;
  }
  return false;
}

std::string format_relinfo(const RelInfo& info) {
  std::ostringstream out;
  out << "Number of tuples in the relation: " << format_number(info.tuples) << '\n';
  out << "Number of values (universe): " << info.universe_size << '\n';
  out << "Number of BDD nodes: " << info.bdd_nodes << '\n';
  out << "Percentage of free nodes in BDD package: " << info.stats.free_nodes << " / "
      << info.stats.total_nodes << " = " << info.stats.percent_free << " %\n";
  out << "Attribute order:";
  for (const auto& name : info.attribute_order) out << ' ' << name;
  out << '\n';
  return out.str();
}

// ---------------------------------------------------------------- engine

RelationEngine::RelationEngine(bdd::Manager& manager, Universe universe)
    : manager_(manager), universe_(std::move(universe)) {}

std::vector<Level> RelationEngine::levels(unsigned slot) const {
  std::vector<Level> out(bits());
  for (unsigned b = 0; b < bits(); ++b) out[b] = slot * bits() + b;
  return out;
}

std::vector<Level> RelationEngine::levels(const std::vector<Attribute>& attributes) const {
  std::vector<Level> out;
  for (const auto& a : attributes) {
    auto block = levels(a.slot);
    out.insert(out.end(), block.begin(), block.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Bdd RelationEngine::domain(unsigned slot) {
  if (domains_.size() <= slot) domains_.resize(slot + 1);
  if (!domains_[slot]) {
    auto block = levels(slot);
    domains_[slot] = manager_.build(
        [&](bdd::Manager& m) { return less_than(m, block, universe_.size()); });
  }
  return *domains_[slot];
}

Bdd RelationEngine::domain_of(const std::vector<Attribute>& attributes) {
  Bdd result = manager_.constant(true);
  for (auto it = attributes.rbegin(); it != attributes.rend(); ++it) {
    result = manager_.apply_and(domain(it->slot), result);
  }
  return result;
}

Relation RelationEngine::stored(std::size_t arity, Bdd root) const {
  Relation r;
  for (std::size_t k = 0; k < arity; ++k) {
    r.attributes.push_back({"i" + std::to_string(k + 1), static_cast<unsigned>(k)});
  }
  r.root = std::move(root);
  return r;
}

Relation RelationEngine::empty(std::size_t arity) {
  return stored(arity, manager_.constant(false));
}

Relation RelationEngine::full(std::size_t arity) {
  if (full_.size() <= arity) full_.resize(arity + 1);
  if (!full_[arity]) {
    Relation r = stored(arity, manager_.constant(true));
    full_[arity] = domain_of(r.attributes);
  }
  return stored(arity, *full_[arity]);
}

Relation RelationEngine::boolean(bool value) { return Relation{{}, manager_.constant(value)}; }

Relation RelationEngine::from_tuples(std::size_t arity,
                                     const std::vector<std::vector<std::string>>& tuples) {
  std::vector<std::vector<std::size_t>> rows;
  rows.reserve(tuples.size());
  for (const auto& t : tuples) {
    if (t.size() != arity) {
      throw RuntimeError("tuple of arity " + std::to_string(t.size()) +
                         " in a relation of arity " + std::to_string(arity));
    }
    std::vector<std::size_t> row;
    for (const auto& s : t) {
      auto index = universe_.index_of(s);
      if (!index) throw RuntimeError("string '" + s + "' is not in the universe");
      row.push_back(*index);
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  Relation r = stored(arity, manager_.constant(false));
  const unsigned k = bits();
  auto all_levels = levels(r.attributes);
  r.root = manager_.from_sorted_rows(all_levels, rows.size(), [&](std::size_t row, std::size_t i) {
    return ((rows[row][i / k] >> (k - 1 - i % k)) & 1U) != 0;
  });
  return r;
}

const Bdd& RelationEngine::comparison_bdd(Comparison op) {
  if (auto it = comparisons_.find(op); it != comparisons_.end()) return it->second;
  const std::size_t n = universe_.size();
  const unsigned k = bits();
  auto upper = levels(0u);
  auto lower = levels(1u);
  Bdd result = manager_.build([&](bdd::Manager& m) {
    auto predicate = [&](std::size_t a) -> NodeRef {
      switch (op) {
        case Comparison::Eq: return index_range(m, lower, a, a + 1);
        case Comparison::Ne:
          return m.raw_or(index_range(m, lower, 0, a), index_range(m, lower, a + 1, n));
        case Comparison::Lt: return index_range(m, lower, a + 1, n);
        case Comparison::Le: return index_range(m, lower, a, n);
        case Comparison::Gt: return index_range(m, lower, 0, a);
        case Comparison::Ge: return index_range(m, lower, 0, a + 1);
      }
      return kFalse;
    };
    std::function<NodeRef(unsigned, std::size_t)> rec = [&](unsigned depth,
                                                             std::size_t prefix) -> NodeRef {
      if ((prefix << (k - depth)) >= n) return kFalse;
      if (depth == k) return predicate(prefix);
      NodeRef low = rec(depth + 1, prefix * 2);
      NodeRef high = rec(depth + 1, prefix * 2 + 1);
      return m.mk(upper[depth], low, high);
    };
    return rec(0, 0);
  });
  return comparisons_.emplace(op, std::move(result)).first->second;
}

Bdd RelationEngine::block_equal(unsigned upper, unsigned lower) {
  std::vector<std::pair<Level, Level>> map;
  for (unsigned b = 0; b < bits(); ++b) {
    map.emplace_back(b, upper * bits() + b);
    map.emplace_back(bits() + b, lower * bits() + b);
  }
  return manager_.rename(comparison_bdd(Comparison::Eq), map);
}

std::vector<Attribute> RelationEngine::merge(const std::vector<Attribute>& a,
                                             const std::vector<Attribute>& b) const {
  std::vector<Attribute> out;
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out),
             [](const Attribute& x, const Attribute& y) { return x.slot < y.slot; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Attribute& x, const Attribute& y) { return x.slot == y.slot; }),
            out.end());
  return out;
}

Relation RelationEngine::pad(const Relation& a, const std::vector<Attribute>& attributes) {
  std::vector<Attribute> missing;
  for (const auto& attr : attributes) {
    bool present = std::any_of(a.attributes.begin(), a.attributes.end(),
                               [&](const Attribute& x) { return x.slot == attr.slot; });
    if (!present) missing.push_back(attr);
  }
  if (missing.empty()) return a;
  return Relation{attributes, manager_.apply_and(a.root, domain_of(missing))};
}

// ---------------------------------------------------------------- atoms

Relation RelationEngine::atom(const Relation& stored_value, std::span<const Term> terms,
                              AttributeOrderLog& log) {
  if (terms.size() != stored_value.arity()) {
    throw RuntimeError("relation of arity " + std::to_string(stored_value.arity()) +
                       " used with " + std::to_string(terms.size()) + " terms");
  }
  std::vector<Attribute> attributes;
  for (const auto& t : terms) {
    if (t.kind != Term::Kind::Attribute) continue;
    unsigned slot = log.slot_of(t.text);
    if (std::none_of(attributes.begin(), attributes.end(),
                     [&](const Attribute& a) { return a.slot == slot; })) {
      attributes.push_back({t.text, slot});
    }
  }
  std::sort(attributes.begin(), attributes.end(),
            [](const Attribute& a, const Attribute& b) { return a.slot < b.slot; });

  Bdd f = stored_value.root;
  std::vector<Level> constant_levels;
  std::vector<bool> constant_bits;
  std::vector<Level> anonymous_levels;
  std::map<std::string, unsigned> first_position;
  std::vector<std::pair<unsigned, unsigned>> repeats;
  for (unsigned k = 0; k < terms.size(); ++k) {
    const Term& t = terms[k];
    auto block = levels(k);
    switch (t.kind) {
      case Term::Kind::Constant: {
        auto code = universe_.encode(t.text);
        if (!code) return Relation{attributes, manager_.constant(false)};
        constant_levels.insert(constant_levels.end(), block.begin(), block.end());
        constant_bits.insert(constant_bits.end(), code->begin(), code->end());
        break;
      }
      case Term::Kind::Anonymous:
        anonymous_levels.insert(anonymous_levels.end(), block.begin(), block.end());
        break;
      case Term::Kind::Attribute:
        if (auto [it, fresh] = first_position.emplace(t.text, k); !fresh) {
          repeats.emplace_back(it->second, k);
        }
        break;
    }
  }
  f = manager_.restrict(f, constant_levels, constant_bits);
  f = manager_.exists(f, anonymous_levels);
  for (auto [first, again] : repeats) {
    f = manager_.and_exists(f, block_equal(first, again), levels(again));
  }
  std::vector<std::pair<Level, Level>> map;
  for (const auto& [name, position] : first_position) {
    unsigned slot = *log.find(name);
    for (unsigned b = 0; b < bits(); ++b) map.emplace_back(position * bits() + b, slot * bits() + b);
  }
  return Relation{attributes, manager_.rename(f, map)};
}

Relation RelationEngine::predefined(bool truth, std::span<const Term> terms,
                                    AttributeOrderLog& log) {
  return atom(truth ? full(terms.size()) : empty(terms.size()), terms, log);
}

Relation RelationEngine::lexicographic(Comparison op, Term left, Term right,
                                       AttributeOrderLog& log) {
  if (left.kind == Term::Kind::Attribute) log.slot_of(left.text);
  if (right.kind == Term::Kind::Attribute) log.slot_of(right.text);
  if (left.kind == Term::Kind::Attribute && right.kind == Term::Kind::Attribute &&
      *log.find(left.text) > *log.find(right.text)) {
    // Keep the block rename order-preserving.
    std::swap(left, right);
    op = converse(op);
  }
  Relation table = stored(2, comparison_bdd(op));
  Term terms[] = {left, right};
  return atom(table, terms, log);
}

Relation RelationEngine::regex(const std::string& pattern, const Term& term,
                               AttributeOrderLog& log) {
  auto it = regexes_.find(pattern);
  if (it == regexes_.end()) {
    regex_t compiled;
    if (int rc = regcomp(&compiled, pattern.c_str(), REG_EXTENDED | REG_NOSUB); rc != 0) {
      char message[256];
      regerror(rc, &compiled, message, sizeof message);
      regfree(&compiled);
      throw RuntimeError("invalid regular expression \"" + pattern + "\": " + message);
    }
    std::vector<std::size_t> matches;
    for (std::size_t i = 0; i < universe_.size(); ++i) {
      if (regexec(&compiled, universe_.at(i).c_str(), 0, nullptr, 0) == 0) matches.push_back(i);
    }
    regfree(&compiled);
    const unsigned k = bits();
    auto block = levels(0u);
    Bdd set = manager_.from_sorted_rows(block, matches.size(), [&](std::size_t row, std::size_t i) {
      return ((matches[row] >> (k - 1 - i)) & 1U) != 0;
    });
    it = regexes_.emplace(pattern, std::move(set)).first;
  }
  Term terms[] = {term};
  return atom(stored(1, it->second), terms, log);
}

// ---------------------------------------------------------------- operators

Relation RelationEngine::combine(Connective op, const Relation& a, const Relation& b) {
  auto attributes = merge(a.attributes, b.attributes);
  if (op == Connective::And) return Relation{attributes, manager_.apply_and(a.root, b.root)};
  Relation pa = pad(a, attributes);
  Relation pb = pad(b, attributes);
  switch (op) {
    case Connective::Or:
      return Relation{attributes, manager_.apply_or(pa.root, pb.root)};
    case Connective::Implies:
      return Relation{attributes,
                      manager_.apply_diff(domain_of(attributes), manager_.apply_diff(pa.root, pb.root))};
    case Connective::Iff:
      return Relation{attributes,
                      manager_.apply_diff(domain_of(attributes), manager_.apply_xor(pa.root, pb.root))};
    case Connective::And:
      break;
  }
  throw std::logic_error("combine: unknown connective");
}

Relation RelationEngine::negate(const Relation& a) {
  return Relation{a.attributes, manager_.apply_diff(domain_of(a.attributes), a.root)};
}

std::vector<Level> RelationEngine::levels_of_names(const Relation& a,
                                                   const std::vector<std::string>& names) const {
  std::vector<Level> out;
  for (const auto& attr : a.attributes) {
    if (std::find(names.begin(), names.end(), attr.name) != names.end()) {
      auto block = levels(attr.slot);
      out.insert(out.end(), block.begin(), block.end());
    }
  }
  return out;
}

namespace {
std::vector<Attribute> without(const std::vector<Attribute>& attributes,
                               const std::vector<std::string>& names) {
  std::vector<Attribute> out;
  for (const auto& a : attributes) {
    if (std::find(names.begin(), names.end(), a.name) == names.end()) out.push_back(a);
  }
  return out;
}
}  // namespace

Relation RelationEngine::exists(const std::vector<std::string>& names, const Relation& a) {
  return Relation{without(a.attributes, names), manager_.exists(a.root, levels_of_names(a, names))};
}

Relation RelationEngine::forall(const std::vector<std::string>& names, const Relation& a) {
  return negate(exists(names, negate(a)));
}

Relation RelationEngine::and_exists(const std::vector<std::string>& names, const Relation& a,
                                    const Relation& b) {
  auto attributes = merge(a.attributes, b.attributes);
  Relation joined{attributes, manager_.constant(true)};
  return Relation{without(attributes, names),
                  manager_.and_exists(a.root, b.root, levels_of_names(joined, names))};
}

std::vector<std::size_t> RelationEngine::unary_members(const Bdd& root, unsigned slot) {
  std::vector<std::size_t> out;
  const unsigned k = bits();
  manager_.for_each_sat(root, levels(slot), [&](const std::vector<bool>& bits_) {
    std::size_t index = 0;
    for (unsigned i = 0; i < k; ++i) index = (index << 1) | (bits_[i] ? 1U : 0U);
    out.push_back(index);
  });
  return out;
}

namespace {
std::pair<unsigned, unsigned> endpoint_slots(const Relation& a, const std::string& source,
                                             const std::string& target) {
  if (a.arity() != 2) throw std::logic_error("transitive closure needs a binary relation");
  std::optional<unsigned> s, t;
  for (const auto& attr : a.attributes) {
    if (attr.name == source) s = attr.slot;
    if (attr.name == target) t = attr.slot;
  }
  if (!s || !t || *s == *t) throw std::logic_error("transitive closure: unknown attributes");
  return {*s, *t};
}
}  // namespace

Relation RelationEngine::transitive_closure(const Relation& a, const std::string& source,
                                            const std::string& target) {
  auto [src, dst] = endpoint_slots(a, source, target);
  auto src_levels = levels(src);
  auto dst_levels = levels(dst);
  std::set<std::size_t> pivots;
  for (auto v : unary_members(manager_.exists(a.root, dst_levels), src)) pivots.insert(v);
  for (auto v : unary_members(manager_.exists(a.root, src_levels), dst)) pivots.insert(v);

  Bdd result = a.root;
  for (std::size_t v : pivots) {
    auto code = *universe_.encode(universe_.at(v));
    Bdd into = manager_.restrict(result, dst_levels, code);  // x with (x, v)
    if (into.is_false()) continue;
    Bdd out_of = manager_.restrict(result, src_levels, code);  // y with (v, y)
    if (out_of.is_false()) continue;
    result = manager_.apply_or(result, manager_.apply_and(into, out_of));
  }
  return Relation{a.attributes, result};
}

Relation RelationEngine::transitive_closure_squaring(const Relation& a, const std::string& source,
                                                     const std::string& target,
                                                     AttributeOrderLog& log) {
  auto [src, dst] = endpoint_slots(a, source, target);
  unsigned x = log.scratch();
  unsigned mid = log.scratch();
  unsigned y = log.scratch();
  auto block_map = [&](std::initializer_list<std::pair<unsigned, unsigned>> moves) {
    std::vector<std::pair<Level, Level>> map;
    for (auto [from, to] : moves) {
      for (unsigned b = 0; b < bits(); ++b) map.emplace_back(from * bits() + b, to * bits() + b);
    }
    return map;
  };
  auto mid_levels = levels(mid);
  Bdd result = manager_.rename(a.root, block_map({{src, x}, {dst, y}}));
  for (;;) {
    Bdd left = manager_.rename(result, block_map({{y, mid}}));
    Bdd right = manager_.rename(result, block_map({{x, mid}}));
    Bdd next = manager_.apply_or(result, manager_.and_exists(left, right, mid_levels));
    if (next == result) break;
    result = std::move(next);
  }
  return Relation{a.attributes, manager_.rename(result, block_map({{x, src}, {y, dst}}))};
}

Relation RelationEngine::compare(Comparison op, const Relation& a, const Relation& b) {
  auto attributes = merge(a.attributes, b.attributes);
  Relation pa = pad(a, attributes);
  Relation pb = pad(b, attributes);
  auto subset = [&](const Relation& x, const Relation& y) {
    return manager_.apply_diff(x.root, y.root).is_false();
  };
  bool value = false;
  switch (op) {
    case Comparison::Eq: value = pa.root == pb.root; break;
    case Comparison::Ne: value = !(pa.root == pb.root); break;
    case Comparison::Le: value = subset(pa, pb); break;
    case Comparison::Lt: value = !(pa.root == pb.root) && subset(pa, pb); break;
    case Comparison::Ge: value = subset(pb, pa); break;
    case Comparison::Gt: value = !(pa.root == pb.root) && subset(pb, pa); break;
  }
  return boolean(value);
}

double RelationEngine::cardinality(const Relation& a) {
  return manager_.sat_count(a.root, levels(a.attributes));
}

double RelationEngine::aggregate(Aggregate kind, const Relation& a) {
  if (a.arity() != 1) throw RuntimeError("aggregate over a relation that is not unary");
  auto members = unary_members(a.root, a.attributes.front().slot);
  if (members.empty()) throw RuntimeError("aggregate over an empty relation");
  double acc = parse_number(universe_.at(members.front()));
  double sum = 0.0;
  for (auto index : members) {
    double v = parse_number(universe_.at(index));
    sum += v;
    if (kind == Aggregate::Min) acc = std::min(acc, v);
    if (kind == Aggregate::Max) acc = std::max(acc, v);
  }
  switch (kind) {
    case Aggregate::Sum: return sum;
    case Aggregate::Avg: return sum / static_cast<double>(members.size());
    default: return acc;
  }
}

void RelationEngine::for_each_tuple(const Relation& a,
                                    const std::function<void(const std::vector<std::size_t>&)>& fn) {
  const unsigned k = bits();
  std::vector<std::size_t> tuple(a.arity());
  manager_.for_each_sat(a.root, levels(a.attributes), [&](const std::vector<bool>& bits_) {
    for (std::size_t col = 0; col < tuple.size(); ++col) {
      std::size_t index = 0;
      for (unsigned i = 0; i < k; ++i) index = (index << 1) | (bits_[col * k + i] ? 1U : 0U);
      tuple[col] = index;
    }
    fn(tuple);
  });
}

std::vector<std::vector<std::size_t>> RelationEngine::enumerate(const Relation& a) {
  std::vector<std::vector<std::size_t>> out;
  for_each_tuple(a, [&](const std::vector<std::size_t>& t) { out.push_back(t); });
  return out;
}

std::vector<std::vector<std::string>> RelationEngine::enumerate_strings(const Relation& a) {
  std::vector<std::vector<std::string>> out;
  for_each_tuple(a, [&](const std::vector<std::size_t>& t) {
    std::vector<std::string> row;
    for (auto i : t) row.push_back(universe_.at(i));
    out.push_back(std::move(row));
  });
  return out;
}

Relation RelationEngine::assign(const Relation* old, std::span<const Term> lhs,
                                const Relation& value) {
  const auto n = lhs.size();
  Relation result = stored(n, manager_.constant(false));
  std::vector<std::pair<Level, Level>> map;
  std::map<std::string, unsigned> first_position;
  std::vector<std::pair<unsigned, unsigned>> repeats;
  std::vector<Level> constant_levels;
  std::vector<bool> constant_bits;
  for (unsigned k = 0; k < n; ++k) {
    const Term& t = lhs[k];
    if (t.kind == Term::Kind::Constant) {
      auto code = universe_.encode(t.text);
      if (!code) throw RuntimeError("string '" + t.text + "' is not in the universe");
      auto block = levels(k);
      constant_levels.insert(constant_levels.end(), block.begin(), block.end());
      constant_bits.insert(constant_bits.end(), code->begin(), code->end());
    } else if (t.kind == Term::Kind::Attribute) {
      if (auto [it, fresh] = first_position.emplace(t.text, k); !fresh) {
        repeats.emplace_back(it->second, k);
        continue;
      }
      auto found = std::find_if(value.attributes.begin(), value.attributes.end(),
                                [&](const Attribute& a) { return a.name == t.text; });
      if (found == value.attributes.end()) {
        throw std::logic_error("assign: attribute '" + t.text + "' is not free on the right");
      }
      for (unsigned b = 0; b < bits(); ++b) {
        map.emplace_back(found->slot * bits() + b, k * bits() + b);
      }
    } else {
      throw std::logic_error("assign: anonymous attribute on the left-hand side");
    }
  }
  Bdd f = manager_.rename(value.root, map);
  for (auto [first, again] : repeats) f = manager_.apply_and(f, block_equal(first, again));
  if (!constant_levels.empty()) {
    Bdd slice = manager_.cube(constant_levels, constant_bits);
    f = manager_.apply_and(f, slice);
    if (old != nullptr) {
      if (old->arity() != n) {
        throw RuntimeError("partial assignment of arity " + std::to_string(n) +
                           " to a relation of arity " + std::to_string(old->arity()));
      }
      f = manager_.apply_or(f, manager_.apply_diff(old->root, slice));
    }
  }
  result.root = std::move(f);
  return result;
}

RelInfo RelationEngine::relinfo(const Relation& a) {
  RelInfo info;
  info.tuples = cardinality(a);
  info.universe_size = universe_.size();
  info.bdd_nodes = manager_.node_count(a.root);
  info.stats = manager_.stats();
  info.attribute_order = a.attribute_names();
  return info;
}

}  // namespace crocopat
