#include <algorithm>

#include "crocopat/ast.hpp"

namespace crocopat::ast {
namespace {

using syntax::Node;

std::string join(const std::vector<std::string>& names) {
  std::string out = "{";
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i];
  return out + "}";
}

void add_free(std::vector<std::string>& into, const std::vector<std::string>& more) {
  for (const auto& name : more) {
    if (std::find(into.begin(), into.end(), name) == into.end()) into.push_back(name);
  }
}

std::string describe(Type t) {
  switch (t) {
    case Type::Relation: return "a relational expression";
    case Type::String: return "a string expression";
    case Type::Number: return "a numerical expression";
    case Type::Attribute: return "an attribute";
    case Type::Anonymous: return "the anonymous attribute";
  }
  return "?";
}

std::optional<Comparison> comparison_of(const std::string& op) {
  if (op == "=") return Comparison::Eq;
  if (op == "!=") return Comparison::Ne;
  if (op == "<") return Comparison::Lt;
  if (op == "<=") return Comparison::Le;
  if (op == ">") return Comparison::Gt;
  if (op == ">=") return Comparison::Ge;
  return std::nullopt;
}

class Resolver {
 public:
  explicit Resolver(const std::set<std::string>& rsf) {
    for (const auto& name : rsf) program_.symbols[name] = Symbol::RelationVar;
  }

  Program run(const syntax::Program& in) {
    for (const auto& s : in.statements) program_.statements.push_back(statement(s));
    return std::move(program_);
  }

 private:
  static bool reserved_relation(const std::string& name) { return name == "TRUE" || name == "FALSE"; }
  static bool reserved_number(const std::string& name) {
    return name == "argCount" || name == "exitStatus";
  }

  static const char* symbol_name(Symbol s) {
    switch (s) {
      case Symbol::Attribute: return "an attribute";
      case Symbol::RelationVar: return "a relation variable";
      case Symbol::StringVar: return "a string variable";
      case Symbol::NumberVar: return "a numerical variable";
    }
    return "?";
  }

  std::optional<Symbol> lookup(const std::string& name) const {
    auto it = program_.symbols.find(name);
    if (it == program_.symbols.end()) return std::nullopt;
    return it->second;
  }

  // Binds `name` to `kind` on first occurrence, otherwise checks it.
  void declare(const std::string& name, Symbol kind, Position pos) {
    if (reserved_relation(name) && kind != Symbol::RelationVar) {
      throw StaticError("'" + name + "' is a predefined relation", pos);
    }
    if (reserved_number(name)) {
      throw StaticError("'" + name + "' is a predefined numerical constant", pos);
    }
    auto [it, fresh] = program_.symbols.emplace(name, kind);
    if (!fresh && it->second != kind) {
      throw StaticError("'" + name + "' is " + symbol_name(it->second) + " and cannot be used as " +
                            symbol_name(kind),
                        pos);
    }
  }

  static ExprPtr make(Expr::Kind kind, Type type, Position pos, std::string name = {}) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->type = type;
    e->pos = pos;
    e->name = std::move(name);
    return e;
  }

  // ---------------------------------------------------------- expressions

  ExprPtr require(ExprPtr e, Type type, const std::string& where) {
    if (e->type != type) {
      throw StaticError(where + " must be " + describe(type) + ", not " + describe(e->type), e->pos);
    }
    return e;
  }
  ExprPtr relation(const Node& n, const std::string& where) {
    return require(expr(n), Type::Relation, where);
  }
  ExprPtr string(const Node& n, const std::string& where) {
    return require(expr(n), Type::String, where);
  }
  ExprPtr number(const Node& n, const std::string& where) {
    return require(expr(n), Type::Number, where);
  }
  ExprPtr term(const Node& n) {
    ExprPtr e = expr(n);
    if (!e->is_term()) {
      throw StaticError("a term must be an attribute, '_' or a string expression, not " +
                            describe(e->type),
                        e->pos);
    }
    return e;
  }

  static std::vector<std::string> term_attributes(const std::vector<ExprPtr>& terms) {
    std::vector<std::string> out;
    for (const auto& t : terms) {
      if (t->type == Type::Attribute) add_free(out, {t->name});
    }
    return out;
  }

  ExprPtr atom(const std::string& name, Position pos, std::vector<ExprPtr> terms) {
    ExprPtr e;
    if (reserved_relation(name)) {
      e = make(Expr::Kind::Predefined, Type::Relation, pos, name);
      e->flag = name == "TRUE";
    } else {
      declare(name, Symbol::RelationVar, pos);
      e = make(Expr::Kind::Atom, Type::Relation, pos, name);
    }
    e->free = term_attributes(terms);
    e->children = std::move(terms);
    return e;
  }

  ExprPtr comparison(Comparison op, Position pos, ExprPtr left, ExprPtr right) {
    ExprPtr e;
    if (left->is_term() && right->is_term()) {
      e = make(Expr::Kind::Lexicographic, Type::Relation, pos);
      if (left->type == Type::Attribute) add_free(e->free, {left->name});
      if (right->type == Type::Attribute) add_free(e->free, {right->name});
    } else if (left->type == Type::Number && right->type == Type::Number) {
      e = make(Expr::Kind::NumberCompare, Type::Relation, pos);
    } else if (left->type == Type::Relation && right->type == Type::Relation) {
      e = make(Expr::Kind::RelationCompare, Type::Relation, pos);
    } else {
      throw StaticError("cannot compare " + describe(left->type) + " with " +
                            describe(right->type),
                        pos);
    }
    e->comparison = op;
    e->children.push_back(std::move(left));
    e->children.push_back(std::move(right));
    return e;
  }

  ExprPtr expr(const Node& n) {
    switch (n.kind) {
      case Node::Kind::Identifier: {
        if (n.text == "argCount") return make(Expr::Kind::ArgCount, Type::Number, n.pos, n.text);
        if (n.text == "exitStatus") return make(Expr::Kind::ExitStatus, Type::Number, n.pos, n.text);
        if (reserved_relation(n.text)) {
          throw StaticError("relation '" + n.text + "' needs a term list", n.pos);
        }
        auto kind = lookup(n.text);
        if (!kind) {
          declare(n.text, Symbol::Attribute, n.pos);
          kind = Symbol::Attribute;
        }
        switch (*kind) {
          case Symbol::Attribute: return make(Expr::Kind::Attribute, Type::Attribute, n.pos, n.text);
          case Symbol::StringVar: return make(Expr::Kind::StringVar, Type::String, n.pos, n.text);
          case Symbol::NumberVar: return make(Expr::Kind::NumberVar, Type::Number, n.pos, n.text);
          case Symbol::RelationVar:
            throw StaticError("relation variable '" + n.text + "' needs a term list", n.pos);
        }
        break;
      }
      case Node::Kind::Anonymous:
        return make(Expr::Kind::Anonymous, Type::Anonymous, n.pos, "_");
      case Node::Kind::String:
        return make(Expr::Kind::StringLiteral, Type::String, n.pos, n.text);
      case Node::Kind::Number: {
        auto e = make(Expr::Kind::NumberLiteral, Type::Number, n.pos, n.text);
        e->number = n.number;
        return e;
      }
      case Node::Kind::Call: {
        // Kind of the name is fixed before its arguments are looked at.
        if (!reserved_relation(n.text)) declare(n.text, Symbol::RelationVar, n.pos);
        std::vector<ExprPtr> terms;
        for (const auto& a : n.args) terms.push_back(term(*a));
        return atom(n.text, n.pos, std::move(terms));
      }
      case Node::Kind::InfixRelation: {
        ExprPtr left = term(*n.args[0]);
        if (reserved_relation(n.text)) {
          throw StaticError("'" + n.text + "' cannot be used as an infix relation", n.pos);
        }
        declare(n.text, Symbol::RelationVar, n.pos);
        std::vector<ExprPtr> terms;
        terms.push_back(std::move(left));
        terms.push_back(term(*n.args[1]));
        return atom(n.text, n.pos, std::move(terms));
      }
      case Node::Kind::Unary: {
        if (n.text == "!") {
          auto e = make(Expr::Kind::Not, Type::Relation, n.pos);
          e->children.push_back(relation(*n.args[0], "the operand of '!'"));
          e->free = e->children[0]->free;
          return e;
        }
        if (n.text == "-") {
          auto e = make(Expr::Kind::Negative, Type::Number, n.pos);
          e->children.push_back(number(*n.args[0], "the operand of unary '-'"));
          return e;
        }
        auto e = make(Expr::Kind::Argument, Type::String, n.pos);
        e->children.push_back(number(*n.args[0], "the operand of '$'"));
        return e;
      }
      case Node::Kind::Binary: {
        const std::string& op = n.text;
        ExprPtr left = expr(*n.args[0]);
        if (op == "&" || op == "|" || op == "->" || op == "<->") {
          left = require(std::move(left), Type::Relation, "the left operand of '" + op + "'");
          ExprPtr right = relation(*n.args[1], "the right operand of '" + op + "'");
          auto e = make(Expr::Kind::Connective, Type::Relation, n.pos);
          e->connective = op == "&"    ? Connective::And
                          : op == "|"  ? Connective::Or
                          : op == "->" ? Connective::Implies
                                       : Connective::Iff;
          e->free = left->free;
          add_free(e->free, right->free);
          e->children.push_back(std::move(left));
          e->children.push_back(std::move(right));
          return e;
        }
        if (op == "+" && left->type == Type::String) {
          auto e = make(Expr::Kind::Concat, Type::String, n.pos);
          e->children.push_back(std::move(left));
          e->children.push_back(string(*n.args[1], "the right operand of '+'"));
          return e;
        }
        left = require(std::move(left), Type::Number, "the left operand of '" + op + "'");
        auto e = make(Expr::Kind::Arithmetic, Type::Number, n.pos);
        e->op = op == "DIV" ? 'd' : op == "MOD" ? 'm' : op[0];
        e->children.push_back(std::move(left));
        e->children.push_back(number(*n.args[1], "the right operand of '" + op + "'"));
        return e;
      }
      case Node::Kind::Compare: {
        ExprPtr left = expr(*n.args[0]);
        ExprPtr right = expr(*n.args[1]);
        return comparison(*comparison_of(n.text), n.pos, std::move(left), std::move(right));
      }
      case Node::Kind::PrefixCompare: {
        if (n.args.size() != 2) {
          throw StaticError("'" + n.text + "' takes exactly two arguments", n.pos);
        }
        ExprPtr left = expr(*n.args[0]);
        ExprPtr right = expr(*n.args[1]);
        return comparison(*comparison_of(n.text), n.pos, std::move(left), std::move(right));
      }
      case Node::Kind::Quantifier: {
        for (std::size_t i = 0; i < n.names.size(); ++i) {
          declare(n.names[i], Symbol::Attribute, n.name_positions[i]);
        }
        ExprPtr body = relation(*n.args[0], "the operand of " + n.text);
        // EX(a, b, e) is EX(a, EX(b, e)).
        for (std::size_t i = n.names.size(); i-- > 0;) {
          const std::string& attr = n.names[i];
          if (std::find(body->free.begin(), body->free.end(), attr) == body->free.end()) {
            throw StaticError("quantified attribute '" + attr + "' is not free in " +
                                  join(body->free),
                              n.name_positions[i]);
          }
          auto e = make(Expr::Kind::Quantifier, Type::Relation, n.pos, attr);
          e->flag = n.text == "FA";
          for (const auto& f : body->free) {
            if (f != attr) e->free.push_back(f);
          }
          e->children.push_back(std::move(body));
          body = std::move(e);
        }
        return body;
      }
      case Node::Kind::Closure: {
        auto e = make(Expr::Kind::Closure, Type::Relation, n.pos, n.text);
        e->flag = n.text == "TCFAST";
        e->children.push_back(relation(*n.args[0], "the operand of " + n.text));
        e->free = e->children[0]->free;
        if (e->free.size() != 2) {
          throw StaticError(n.text + " needs exactly two free attributes, found " + join(e->free),
                            n.pos);
        }
        return e;
      }
      case Node::Kind::Regex: {
        auto e = make(Expr::Kind::Regex, Type::Relation, n.pos);
        e->children.push_back(string(*n.args[0], "a regular expression"));
        if (n.args.size() != 2) throw StaticError("'@' takes exactly one term", n.pos);
        e->children.push_back(term(*n.args[1]));
        if (e->children[1]->type == Type::Attribute) e->free.push_back(e->children[1]->name);
        return e;
      }
      case Node::Kind::Builtin: {
        const std::string& word = n.text;
        if (word == "NUMBER") {
          auto e = make(Expr::Kind::NumberOf, Type::Number, n.pos);
          e->children.push_back(string(*n.args[0], "the operand of NUMBER"));
          return e;
        }
        if (word == "STRING") {
          auto e = make(Expr::Kind::StringOf, Type::String, n.pos);
          e->children.push_back(number(*n.args[0], "the operand of STRING"));
          return e;
        }
        if (word == "#") {
          auto e = make(Expr::Kind::Cardinality, Type::Number, n.pos);
          e->children.push_back(relation(*n.args[0], "the operand of '#'"));
          return e;
        }
        auto e = make(Expr::Kind::Aggregate, Type::Number, n.pos, word);
        e->aggregate = word == "MIN"   ? Aggregate::Min
                       : word == "MAX" ? Aggregate::Max
                       : word == "SUM" ? Aggregate::Sum
                                       : Aggregate::Avg;
        e->children.push_back(relation(*n.args[0], "the operand of " + word));
        if (e->children[0]->free.size() != 1) {
          throw StaticError(word + " needs exactly one free attribute, found " +
                                join(e->children[0]->free),
                            n.pos);
        }
        return e;
      }
      case Node::Kind::Paren:
        return expr(*n.args[0]);
    }
    throw StaticError("unsupported expression", n.pos);
  }

  // ---------------------------------------------------------- statements

  std::vector<Statement> statements(const std::vector<syntax::Statement>& in) {
    std::vector<Statement> out;
    for (const auto& s : in) out.push_back(statement(s));
    return out;
  }

  ExprPtr lhs_term(const Node& n) {
    if (n.kind == Node::Kind::String) {
      program_.lhs_literals.insert(n.text);
      return make(Expr::Kind::StringLiteral, Type::String, n.pos, n.text);
    }
    if (n.kind == Node::Kind::Identifier && !reserved_number(n.text) &&
        !reserved_relation(n.text)) {
      declare(n.text, Symbol::Attribute, n.pos);
      return make(Expr::Kind::Attribute, Type::Attribute, n.pos, n.text);
    }
    throw StaticError("terms on the left-hand side must be attributes or string literals", n.pos);
  }

  Statement statement(const syntax::Statement& s) {
    using SK = syntax::Statement::Kind;
    Statement out;
    out.pos = s.pos;
    out.name = s.name;
    switch (s.kind) {
      case SK::RelAssign:
      case SK::RelFact: {
        out.kind = Statement::Kind::RelAssign;
        if (reserved_relation(s.name)) {
          throw StaticError("cannot assign to predefined relation '" + s.name + "'", s.name_pos);
        }
        declare(s.name, Symbol::RelationVar, s.name_pos);
        for (const auto& t : s.terms) out.terms.push_back(lhs_term(*t));
        if (s.kind == SK::RelFact) {
          auto e = make(Expr::Kind::Predefined, Type::Relation, s.pos, "TRUE");
          e->flag = true;
          for (const auto& t : out.terms) {
            auto copy = make(t->kind, t->type, t->pos, t->name);
            e->children.push_back(std::move(copy));
          }
          e->free = term_attributes(e->children);
          out.expr = std::move(e);
        } else {
          out.expr = relation(*s.expr, "the right-hand side of a relational assignment");
        }
        auto lhs = term_attributes(out.terms);
        auto rhs = out.expr->free;
        auto sorted_lhs = lhs, sorted_rhs = rhs;
        std::sort(sorted_lhs.begin(), sorted_lhs.end());
        std::sort(sorted_rhs.begin(), sorted_rhs.end());
        if (sorted_lhs != sorted_rhs) {
          throw StaticError("attributes on the left-hand side " + join(lhs) +
                                " differ from the free attributes " + join(rhs) +
                                " of the right-hand side",
                            s.pos);
        }
        return out;
      }
      case SK::Assign: {
        if (reserved_number(s.name)) {
          throw StaticError("cannot assign to '" + s.name + "'", s.name_pos);
        }
        auto known = lookup(s.name);
        ExprPtr rhs;
        if (known == Symbol::StringVar) {
          rhs = string(*s.expr, "the value assigned to string variable '" + s.name + "'");
        } else if (known == Symbol::NumberVar) {
          rhs = number(*s.expr, "the value assigned to numerical variable '" + s.name + "'");
        } else if (known) {
          throw StaticError("'" + s.name + "' is " + symbol_name(*known) +
                                " and cannot be assigned with ':='",
                            s.name_pos);
        } else {
          rhs = expr(*s.expr);
          if (rhs->type == Type::String) {
            declare(s.name, Symbol::StringVar, s.name_pos);
          } else if (rhs->type == Type::Number) {
            declare(s.name, Symbol::NumberVar, s.name_pos);
          } else {
            throw StaticError("cannot assign " + describe(rhs->type) + " to '" + s.name +
                                  "'; relational assignments need a term list",
                              s.pos);
          }
        }
        out.kind = rhs->type == Type::String ? Statement::Kind::StringAssign
                                             : Statement::Kind::NumberAssign;
        out.expr = std::move(rhs);
        return out;
      }
      case SK::If:
      case SK::While: {
        out.kind = s.kind == SK::If ? Statement::Kind::If : Statement::Kind::While;
        const char* what = s.kind == SK::If ? "IF" : "WHILE";
        out.expr = relation(*s.expr, std::string("the condition of ") + what);
        if (!out.expr->free.empty()) {
          throw StaticError(std::string("the condition of ") + what +
                                " must not have free attributes, found " + join(out.expr->free),
                            out.expr->pos);
        }
        out.body = statements(s.body);
        out.has_else = s.has_else;
        out.orelse = statements(s.orelse);
        return out;
      }
      case SK::For: {
        out.kind = Statement::Kind::For;
        declare(s.name, Symbol::StringVar, s.name_pos);
        out.expr = relation(*s.expr, "the set of a FOR loop");
        if (out.expr->free.size() != 1) {
          throw StaticError("the set of a FOR loop needs exactly one free attribute, found " +
                                join(out.expr->free),
                            out.expr->pos);
        }
        out.body = statements(s.body);
        return out;
      }
      case SK::Print: {
        out.kind = Statement::Kind::Print;
        for (const auto& item : s.items) {
          PrintItem p;
          p.pos = item.pos;
          switch (item.kind) {
            case syntax::PrintItem::Kind::Endl: p.kind = PrintItem::Kind::Endl; break;
            case syntax::PrintItem::Kind::RelInfo:
              p.kind = PrintItem::Kind::RelInfo;
              p.expr = relation(*item.expr, "the operand of RELINFO");
              break;
            case syntax::PrintItem::Kind::Prefixed:
              p.kind = PrintItem::Kind::Prefixed;
              p.prefix = string(*item.prefix, "a tuple prefix");
              p.expr = relation(*item.expr, "a prefixed print item");
              break;
            case syntax::PrintItem::Kind::Expression:
              p.kind = PrintItem::Kind::Value;
              p.expr = expr(*item.expr);
              if (p.expr->type == Type::Attribute || p.expr->type == Type::Anonymous) {
                throw StaticError("cannot print " + describe(p.expr->type), p.expr->pos);
              }
              break;
          }
          out.items.push_back(std::move(p));
        }
        out.to_stderr = s.to_stderr;
        if (s.target) out.target = string(*s.target, "the output file name");
        return out;
      }
      case SK::Exec:
        out.kind = Statement::Kind::Exec;
        out.expr = string(*s.expr, "the operand of EXEC");
        return out;
      case SK::Exit:
        out.kind = Statement::Kind::Exit;
        out.expr = number(*s.expr, "the operand of EXIT");
        return out;
      case SK::Block:
        out.kind = Statement::Kind::Block;
        out.body = statements(s.body);
        return out;
    }
    throw StaticError("unsupported statement", s.pos);
  }

  Program program_;
};

}  // namespace

Program resolve(const syntax::Program& program, const std::set<std::string>& rsf_relations) {
  return Resolver(rsf_relations).run(program);
}

Program parse_and_resolve(std::string_view source, const std::set<std::string>& rsf_relations) {
  return resolve(syntax::parse(source), rsf_relations);
}

}  // namespace crocopat::ast
