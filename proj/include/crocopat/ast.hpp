#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "crocopat/error.hpp"
#include "crocopat/relation.hpp"
#include "crocopat/syntax.hpp"

// Typed program representation. Every identifier has been classified as an
// attribute, relation variable, string variable or numerical variable, and
// all context conditions have been checked.
namespace crocopat::ast {

enum class Type { Relation, String, Number, Attribute, Anonymous };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind {
    // terms
    Attribute,
    Anonymous,
    // string expressions
    StringLiteral,
    StringVar,
    Concat,
    StringOf,   // STRING(num)
    Argument,   // $ num
    // numerical expressions
    NumberLiteral,
    NumberVar,
    ArgCount,
    ExitStatus,
    NumberOf,   // NUMBER(str)
    Cardinality,
    Aggregate,
    Arithmetic,  // op in "+-*/^" or 'd' (DIV), 'm' (MOD)
    Negative,
    // relational expressions
    Atom,        // name(children...)
    Predefined,  // TRUE/FALSE(children...)
    Lexicographic,
    Regex,       // children[0] pattern, children[1] term
    Not,
    Connective,
    Quantifier,  // name = attribute, children[0]
    Closure,
    NumberCompare,
    RelationCompare,
  };

  Kind kind;
  Type type;
  Position pos;
  std::string name;  // variable/attribute/relation name, literal text
  double number = 0;
  char op = 0;
  Comparison comparison = Comparison::Eq;
  Connective connective = Connective::And;
  crocopat::Aggregate aggregate = crocopat::Aggregate::Min;
  bool flag = false;  // TRUE for Predefined, FA for Quantifier, TCFAST for Closure
  std::vector<ExprPtr> children;
  /// Free attributes of a relational expression, in order of first textual
  /// occurrence.
  std::vector<std::string> free;

  bool is_term() const {
    return type == Type::Attribute || type == Type::Anonymous || type == Type::String;
  }
};

struct PrintItem {
  enum class Kind { Value, Prefixed, Endl, RelInfo };
  Kind kind = Kind::Value;
  Position pos;
  ExprPtr prefix;
  ExprPtr expr;
};

struct Statement {
  enum class Kind { RelAssign, StringAssign, NumberAssign, If, While, For, Print, Exec, Exit, Block };
  Kind kind;
  Position pos;
  std::string name;
  std::vector<ExprPtr> terms;  // Attribute or StringLiteral
  ExprPtr expr;
  std::vector<Statement> body;
  std::vector<Statement> orelse;
  bool has_else = false;
  std::vector<PrintItem> items;
  bool to_stderr = false;
  ExprPtr target;
};

enum class Symbol { Attribute, RelationVar, StringVar, NumberVar };

struct Program {
  std::vector<Statement> statements;
  /// String literals on left-hand sides; they extend the universe.
  std::set<std::string> lhs_literals;
  std::map<std::string, Symbol> symbols;
};

/// Classifies identifiers in program order (relation names from the RSF
/// input are known up front) and checks the context conditions. Throws
/// StaticError.
Program resolve(const syntax::Program& program, const std::set<std::string>& rsf_relations = {});

Program parse_and_resolve(std::string_view source, const std::set<std::string>& rsf_relations = {});

/// RML source for the program; parsing it again yields the same tree.
std::string to_source(const Program& program);
std::string to_source(const Expr& expr);

/// Unambiguous structural dump used to compare trees.
std::string dump(const Program& program);
std::string dump(const Expr& expr);

}  // namespace crocopat::ast
