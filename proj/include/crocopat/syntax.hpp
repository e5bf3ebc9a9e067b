#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "crocopat/error.hpp"

// Tokens and the untyped syntax tree. Identifier kinds are unknown at this
// stage; the resolver (ast.hpp) turns this tree into typed expressions.
namespace crocopat::syntax {

struct Token {
  enum class Kind { Identifier, Keyword, String, Number, Symbol, End };
  Kind kind = Kind::End;
  std::string text;  // string literals without the quotes
  double number = 0;
  Position pos;
};

/// Throws SyntaxError for unterminated strings/comments and stray characters.
std::vector<Token> tokenize(std::string_view source);

struct Node;
using NodePtr = std::unique_ptr<Node>;

struct Node {
  enum class Kind {
    Identifier,     // text
    Anonymous,      // _
    String,         // text
    Number,         // number
    Call,           // text(args...)
    Unary,          // text in {"!", "-", "$"}, args[0]
    Binary,         // text operator, args[0], args[1]
    Compare,        // infix comparison
    PrefixCompare,  // text(args...) with text a comparison operator
    InfixRelation,  // args[0] text args[1]
    Quantifier,     // text EX/FA, names, args[0]
    Closure,        // text TC/TCFAST, args[0]
    Regex,          // args[0] pattern, args[1..] terms
    Builtin,        // text NUMBER/STRING/#/MIN/MAX/SUM/AVG, args[0]
    Paren,          // args[0]
  };
  Kind kind;
  Position pos;
  std::string text;
  double number = 0;
  std::vector<NodePtr> args;
  std::vector<std::string> names;
  std::vector<Position> name_positions;
};

struct PrintItem {
  enum class Kind { Expression, Prefixed, Endl, RelInfo };
  Kind kind = Kind::Expression;
  Position pos;
  NodePtr prefix;
  NodePtr expr;
};

struct Statement {
  enum class Kind { RelAssign, RelFact, Assign, If, While, For, Print, Exec, Exit, Block };
  Kind kind;
  Position pos;
  std::string name;
  Position name_pos;
  std::vector<NodePtr> terms;  // left-hand side of relational assignments and facts
  NodePtr expr;
  std::vector<Statement> body;
  std::vector<Statement> orelse;
  bool has_else = false;
  std::vector<PrintItem> items;
  bool to_stderr = false;
  NodePtr target;  // PRINT ... TO target
};

struct Program {
  std::vector<Statement> statements;
};

/// Throws SyntaxError with the position of the offending token.
Program parse(std::string_view source);

}  // namespace crocopat::syntax
