#pragma once

// Helpers shared by the unit and acceptance tests: running whole programs,
// and a set-based reference evaluator for relational expressions.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "crocopat/ast.hpp"
#include "crocopat/cli.hpp"

namespace testing_support {

struct RunResult {
  int status = 0;
  std::string out;
  std::string err;
};

inline std::filesystem::path scratch_dir() {
  static std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("crocopat_tests_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

inline std::string write_file(const std::string& name, const std::string& text) {
  auto path = scratch_dir() / name;
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

/// Runs the tool in-process. `options` come before the program file.
inline RunResult run_program(const std::string& program, const std::string& rsf,
                             std::vector<std::string> options = {},
                             std::vector<std::string> arguments = {}) {
  static int counter = 0;
  std::string path = write_file("prog" + std::to_string(counter++) + ".rml", program);
  std::vector<std::string> argv{"crocopat"};
  argv.insert(argv.end(), options.begin(), options.end());
  argv.push_back(path);
  argv.insert(argv.end(), arguments.begin(), arguments.end());
  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());
  std::istringstream in(rsf);
  std::ostringstream out, err;
  RunResult r;
  r.status = crocopat::run_cli(static_cast<int>(raw.size()), raw.data(), in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// ---------------------------------------------------------------- oracle
//
// A relation over named attributes: `attributes` sorted by name, each tuple
// lists universe indices in that order.
struct SetRelation {
  std::vector<std::string> attributes;
  std::set<std::vector<int>> tuples;

  friend bool operator==(const SetRelation&, const SetRelation&) = default;
};

class SetEvaluator {
 public:
  SetEvaluator(std::vector<std::string> universe,
               std::map<std::string, std::set<std::vector<int>>> relations)
      : universe_(std::move(universe)), relations_(std::move(relations)) {}

  int n() const { return static_cast<int>(universe_.size()); }

  int index_of(const std::string& s) const {
    auto it = std::find(universe_.begin(), universe_.end(), s);
    return it == universe_.end() ? -1 : static_cast<int>(it - universe_.begin());
  }

  // All assignments to `attrs` (sorted).
  std::vector<std::vector<int>> assignments(std::size_t k) const {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k, 0);
    if (k == 0) return {{}};
    if (n() == 0) return {};
    for (;;) {
      out.push_back(cur);
      std::size_t i = k;
      while (i > 0) {
        --i;
        if (++cur[i] < n()) break;
        cur[i] = 0;
        if (i == 0) return out;
      }
    }
  }

  // Re-expresses `r` over the sorted attribute list `attrs` (a superset).
  SetRelation extend(const SetRelation& r, const std::vector<std::string>& attrs) const {
    SetRelation out{attrs, {}};
    std::vector<int> pos;
    for (const auto& a : attrs) {
      auto it = std::find(r.attributes.begin(), r.attributes.end(), a);
      pos.push_back(it == r.attributes.end() ? -1 : static_cast<int>(it - r.attributes.begin()));
    }
    for (const auto& full : assignments(attrs.size())) {
      std::vector<int> in_r(r.attributes.size());
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (pos[i] >= 0) in_r[pos[i]] = full[i];
      }
      if (r.tuples.count(in_r)) out.tuples.insert(full);
    }
    return out;
  }

  static std::vector<std::string> unite(const std::vector<std::string>& a,
                                        const std::vector<std::string>& b) {
    std::set<std::string> s(a.begin(), a.end());
    s.insert(b.begin(), b.end());
    return {s.begin(), s.end()};
  }

  struct TermValue {
    enum Kind { Attr, Anon, Const } kind;
    std::string name;
    int value = -1;  // for Const; -1 when not in the universe
  };

  // rel(term...) against an explicit tuple set.
  SetRelation atom(const std::set<std::vector<int>>& stored, const std::vector<TermValue>& terms) const {
    std::set<std::string> names;
    for (const auto& t : terms) {
      if (t.kind == TermValue::Attr) names.insert(t.name);
    }
    SetRelation out{{names.begin(), names.end()}, {}};
    for (const auto& tuple : stored) {
      std::map<std::string, int> v;
      bool ok = tuple.size() == terms.size();
      for (std::size_t i = 0; ok && i < terms.size(); ++i) {
        const auto& t = terms[i];
        if (t.kind == TermValue::Const) ok = t.value == tuple[i];
        if (t.kind == TermValue::Attr) {
          auto [it, fresh] = v.emplace(t.name, tuple[i]);
          ok = fresh || it->second == tuple[i];
        }
      }
      if (!ok) continue;
      std::vector<int> row;
      for (const auto& a : out.attributes) row.push_back(v[a]);
      out.tuples.insert(row);
    }
    return out;
  }

  std::set<std::vector<int>> full(std::size_t arity) const {
    auto all = assignments(arity);
    return {all.begin(), all.end()};
  }

  TermValue term(const crocopat::ast::Expr& e) const {
    using K = crocopat::ast::Expr::Kind;
    if (e.kind == K::Attribute) return {TermValue::Attr, e.name};
    if (e.kind == K::Anonymous) return {TermValue::Anon, "_"};
    if (e.kind == K::StringLiteral) return {TermValue::Const, e.name, index_of(e.name)};
    throw std::runtime_error("oracle: unsupported term");
  }

  std::set<std::vector<int>> lex_table(crocopat::Comparison c) const {
    std::set<std::vector<int>> out;
    for (int a = 0; a < n(); ++a) {
      for (int b = 0; b < n(); ++b) {
        const auto& sa = universe_[a];
        const auto& sb = universe_[b];
        bool keep = false;
        switch (c) {
          case crocopat::Comparison::Eq: keep = sa == sb; break;
          case crocopat::Comparison::Ne: keep = sa != sb; break;
          case crocopat::Comparison::Lt: keep = sa < sb; break;
          case crocopat::Comparison::Le: keep = sa <= sb; break;
          case crocopat::Comparison::Gt: keep = sa > sb; break;
          case crocopat::Comparison::Ge: keep = sa >= sb; break;
        }
        if (keep) out.insert({a, b});
      }
    }
    return out;
  }

  SetRelation eval(const crocopat::ast::Expr& e) const {
    using K = crocopat::ast::Expr::Kind;
    switch (e.kind) {
      case K::Atom: {
        std::vector<TermValue> ts;
        for (const auto& c : e.children) ts.push_back(term(*c));
        auto it = relations_.find(e.name);
        static const std::set<std::vector<int>> none;
        return atom(it == relations_.end() ? none : it->second, ts);
      }
      case K::Predefined: {
        std::vector<TermValue> ts;
        for (const auto& c : e.children) ts.push_back(term(*c));
        return atom(e.flag ? full(ts.size()) : std::set<std::vector<int>>{}, ts);
      }
      case K::Lexicographic:
        return atom(lex_table(e.comparison), {term(*e.children[0]), term(*e.children[1])});
      case K::Regex: {
        std::regex re(e.children[0]->name, std::regex::extended);
        std::set<std::vector<int>> matching;
        for (int i = 0; i < n(); ++i)
          if (std::regex_search(universe_[i], re)) matching.insert({i});
        return atom(matching, {term(*e.children[1])});
      }
      case K::Not: {
        SetRelation inner = eval(*e.children[0]);
        SetRelation out{inner.attributes, {}};
        for (const auto& row : assignments(inner.attributes.size())) {
          if (!inner.tuples.count(row)) out.tuples.insert(row);
        }
        return out;
      }
      case K::Connective: {
        SetRelation a = eval(*e.children[0]);
        SetRelation b = eval(*e.children[1]);
        auto attrs = unite(a.attributes, b.attributes);
        a = extend(a, attrs);
        b = extend(b, attrs);
        SetRelation out{attrs, {}};
        for (const auto& row : assignments(attrs.size())) {
          bool x = a.tuples.count(row) > 0, y = b.tuples.count(row) > 0;
          bool keep = false;
          switch (e.connective) {
            case crocopat::Connective::And: keep = x && y; break;
            case crocopat::Connective::Or: keep = x || y; break;
            case crocopat::Connective::Implies: keep = !x || y; break;
            case crocopat::Connective::Iff: keep = x == y; break;
          }
          if (keep) out.tuples.insert(row);
        }
        return out;
      }
      case K::Quantifier: {
        SetRelation inner = eval(*e.children[0]);
        auto pos = std::find(inner.attributes.begin(), inner.attributes.end(), e.name) -
                   inner.attributes.begin();
        SetRelation out;
        for (const auto& a : inner.attributes) {
          if (a != e.name) out.attributes.push_back(a);
        }
        for (const auto& rest : assignments(out.attributes.size())) {
          int hits = 0;
          for (int v = 0; v < n(); ++v) {
            std::vector<int> row = rest;
            row.insert(row.begin() + pos, v);
            hits += inner.tuples.count(row) ? 1 : 0;
          }
          bool keep = e.flag ? hits == n() : hits > 0;
          if (keep) out.tuples.insert(rest);
        }
        return out;
      }
      case K::Closure: {
        SetRelation inner = eval(*e.children[0]);
        const auto& src = e.children[0]->free[0];
        bool src_first = inner.attributes[0] == src;
        std::vector<std::vector<bool>> m(n(), std::vector<bool>(n(), false));
        for (const auto& t : inner.tuples) {
          int s = src_first ? t[0] : t[1], d = src_first ? t[1] : t[0];
          m[s][d] = true;
        }
        for (int k = 0; k < n(); ++k)
          for (int i = 0; i < n(); ++i)
            for (int j = 0; j < n(); ++j)
              if (m[i][k] && m[k][j]) m[i][j] = true;
        SetRelation out{inner.attributes, {}};
        for (int i = 0; i < n(); ++i)
          for (int j = 0; j < n(); ++j)
            if (m[i][j]) out.tuples.insert(src_first ? std::vector<int>{i, j} : std::vector<int>{j, i});
        return out;
      }
      case K::RelationCompare: {
        SetRelation a = eval(*e.children[0]);
        SetRelation b = eval(*e.children[1]);
        auto attrs = unite(a.attributes, b.attributes);
        a = extend(a, attrs);
        b = extend(b, attrs);
        bool sub = std::includes(b.tuples.begin(), b.tuples.end(), a.tuples.begin(), a.tuples.end());
        bool sup = std::includes(a.tuples.begin(), a.tuples.end(), b.tuples.begin(), b.tuples.end());
        bool keep = false;
        switch (e.comparison) {
          case crocopat::Comparison::Eq: keep = sub && sup; break;
          case crocopat::Comparison::Ne: keep = !(sub && sup); break;
          case crocopat::Comparison::Lt: keep = sub && !sup; break;
          case crocopat::Comparison::Le: keep = sub; break;
          case crocopat::Comparison::Gt: keep = sup && !sub; break;
          case crocopat::Comparison::Ge: keep = sup; break;
        }
        SetRelation out;
        if (keep) out.tuples.insert(std::vector<int>{});
        return out;
      }
      default:
        throw std::runtime_error("oracle: unsupported expression");
    }
  }

  /// The partial-update assignment rule.
  std::set<std::vector<int>> assign(const std::set<std::vector<int>>& old,
                                    const std::vector<TermValue>& lhs, const SetRelation& value) const {
    std::set<std::vector<int>> out;
    for (const auto& row : value.tuples) {
      std::vector<int> t;
      for (const auto& term : lhs) {
        if (term.kind == TermValue::Const) {
          t.push_back(term.value);
        } else {
          auto pos = std::find(value.attributes.begin(), value.attributes.end(), term.name) -
                     value.attributes.begin();
          t.push_back(row[pos]);
        }
      }
      out.insert(t);
    }
    for (const auto& t : old) {
      bool differs = false;
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (lhs[i].kind == TermValue::Const && lhs[i].value != t[i]) differs = true;
      }
      if (differs) out.insert(t);
    }
    return out;
  }

 private:
  std::vector<std::string> universe_;
  std::map<std::string, std::set<std::vector<int>>> relations_;
};

// Floyd-Warshall over an adjacency matrix.
inline std::vector<std::vector<bool>> closure_matrix(std::vector<std::vector<bool>> m) {
  const std::size_t n = m.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (m[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (m[k][j]) m[i][j] = true;
  return m;
}

}  // namespace testing_support
