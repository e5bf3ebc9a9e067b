#include <sstream>

#include "crocopat/ast.hpp"
#include "crocopat/numbers.hpp"

namespace crocopat::ast {
namespace {

// Binding strength, loosest first; mirrors the parser.
enum Level {
  kCompare = 1,
  kImplies,
  kOr,
  kAnd,
  kNot,
  kAdd,
  kMul,
  kPow,
  kNeg,
  kDollar,
  kPrimary,
};

const char* comparison_text(Comparison c) {
  switch (c) {
    case Comparison::Eq: return "=";
    case Comparison::Ne: return "!=";
    case Comparison::Lt: return "<";
    case Comparison::Le: return "<=";
    case Comparison::Gt: return ">";
    case Comparison::Ge: return ">=";
  }
  return "?";
}

const char* connective_text(Connective c) {
  switch (c) {
    case Connective::And: return "&";
    case Connective::Or: return "|";
    case Connective::Implies: return "->";
    case Connective::Iff: return "<->";
  }
  return "?";
}

int connective_level(Connective c) {
  switch (c) {
    case Connective::And: return kAnd;
    case Connective::Or: return kOr;
    default: return kImplies;
  }
}

std::string arithmetic_text(char op) {
  if (op == 'd') return "DIV";
  if (op == 'm') return "MOD";
  return std::string(1, op);
}

int arithmetic_level(char op) {
  if (op == '+' || op == '-') return kAdd;
  if (op == '^') return kPow;
  return kMul;
}

const char* aggregate_text(Aggregate a) {
  switch (a) {
    case Aggregate::Min: return "MIN";
    case Aggregate::Max: return "MAX";
    case Aggregate::Sum: return "SUM";
    case Aggregate::Avg: return "AVG";
  }
  return "?";
}

class Printer {
 public:
  std::string expr(const Expr& e, int context = 0) {
    int level = kPrimary;
    std::string s;
    auto child = [&](std::size_t i, int at) { return expr(*e.children[i], at); };
    auto list = [&](std::size_t from) {
      std::string out = "(";
      for (std::size_t i = from; i < e.children.size(); ++i) {
        if (i > from) out += ", ";
        out += child(i, 0);
      }
      return out + ")";
    };
    switch (e.kind) {
      case Expr::Kind::Attribute:
      case Expr::Kind::StringVar:
      case Expr::Kind::NumberVar:
      case Expr::Kind::ArgCount:
      case Expr::Kind::ExitStatus:
      case Expr::Kind::NumberLiteral:
        s = e.name;
        break;
      case Expr::Kind::Anonymous: s = "_"; break;
      case Expr::Kind::StringLiteral: s = "\"" + e.name + "\""; break;
      case Expr::Kind::Concat:
        level = kAdd;
        s = child(0, kAdd) + " + " + child(1, kMul);
        break;
      case Expr::Kind::StringOf: s = "STRING(" + child(0, 0) + ")"; break;
      case Expr::Kind::Argument:
        level = kDollar;
        s = "$" + child(0, kDollar);
        break;
      case Expr::Kind::NumberOf: s = "NUMBER(" + child(0, 0) + ")"; break;
      case Expr::Kind::Cardinality: s = "#(" + child(0, 0) + ")"; break;
      case Expr::Kind::Aggregate:
        s = std::string(aggregate_text(e.aggregate)) + "(" + child(0, 0) + ")";
        break;
      case Expr::Kind::Arithmetic:
        level = arithmetic_level(e.op);
        if (e.op == '^') {
          s = child(0, kNeg) + " ^ " + child(1, kPow);
        } else {
          s = child(0, level) + " " + arithmetic_text(e.op) + " " + child(1, level + 1);
        }
        break;
      case Expr::Kind::Negative:
        level = kNeg;
        s = "-" + child(0, kNeg);
        break;
      case Expr::Kind::Atom:
      case Expr::Kind::Predefined:
        s = e.name + list(0);
        break;
      case Expr::Kind::Regex: {
        const Expr& pattern = *e.children[0];
        bool bare = pattern.kind == Expr::Kind::StringLiteral || pattern.kind == Expr::Kind::StringVar;
        s = "@" + (bare ? expr(pattern) : "(" + expr(pattern) + ")") + "(" + child(1, 0) + ")";
        break;
      }
      case Expr::Kind::Not:
        level = kNot;
        s = "!" + child(0, kNot);
        break;
      case Expr::Kind::Connective:
        level = connective_level(e.connective);
        s = child(0, level) + " " + connective_text(e.connective) + " " + child(1, level + 1);
        break;
      case Expr::Kind::Quantifier:
        s = std::string(e.flag ? "FA(" : "EX(") + e.name + ", " + child(0, 0) + ")";
        break;
      case Expr::Kind::Closure:
        s = std::string(e.flag ? "TCFAST(" : "TC(") + child(0, 0) + ")";
        break;
      case Expr::Kind::Lexicographic:
      case Expr::Kind::NumberCompare:
      case Expr::Kind::RelationCompare:
        level = kCompare;
        s = child(0, kImplies) + " " + comparison_text(e.comparison) + " " + child(1, kImplies);
        break;
    }
    if (level < context) return "(" + s + ")";
    return s;
  }

  void statements(const std::vector<Statement>& list, int indent) {
    for (const auto& s : list) statement(s, indent);
  }

  void block(const std::vector<Statement>& body, int indent) {
    out_ << "{\n";
    statements(body, indent + 1);
    out_ << std::string(2 * indent, ' ') << "}";
  }

  void statement(const Statement& s, int indent) {
    out_ << std::string(2 * indent, ' ');
    switch (s.kind) {
      case Statement::Kind::RelAssign: {
        out_ << s.name << "(";
        for (std::size_t i = 0; i < s.terms.size(); ++i) out_ << (i ? ", " : "") << expr(*s.terms[i]);
        out_ << ") := " << expr(*s.expr) << ";\n";
        return;
      }
      case Statement::Kind::StringAssign:
      case Statement::Kind::NumberAssign:
        out_ << s.name << " := " << expr(*s.expr) << ";\n";
        return;
      case Statement::Kind::If:
        out_ << "IF " << expr(*s.expr) << " ";
        block(s.body, indent);
        if (s.has_else) {
          out_ << " ELSE ";
          block(s.orelse, indent);
        }
        out_ << "\n";
        return;
      case Statement::Kind::While:
        out_ << "WHILE " << expr(*s.expr) << " ";
        block(s.body, indent);
        out_ << "\n";
        return;
      case Statement::Kind::For:
        out_ << "FOR " << s.name << " IN " << expr(*s.expr) << " ";
        block(s.body, indent);
        out_ << "\n";
        return;
      case Statement::Kind::Print:
        out_ << "PRINT ";
        for (std::size_t i = 0; i < s.items.size(); ++i) {
          const auto& item = s.items[i];
          if (i) out_ << ", ";
          switch (item.kind) {
            case PrintItem::Kind::Endl: out_ << "ENDL"; break;
            case PrintItem::Kind::RelInfo: out_ << "RELINFO(" << expr(*item.expr) << ")"; break;
            case PrintItem::Kind::Prefixed:
              out_ << "[" << expr(*item.prefix) << "] " << expr(*item.expr);
              break;
            case PrintItem::Kind::Value: out_ << expr(*item.expr); break;
          }
        }
        if (s.to_stderr) out_ << " TO STDERR";
        if (s.target) out_ << " TO " << expr(*s.target);
        out_ << ";\n";
        return;
      case Statement::Kind::Exec:
        out_ << "EXEC " << expr(*s.expr) << ";\n";
        return;
      case Statement::Kind::Exit:
        out_ << "EXIT " << expr(*s.expr) << ";\n";
        return;
      case Statement::Kind::Block:
        block(s.body, indent);
        out_ << "\n";
        return;
    }
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

void dump_expr(std::ostream& out, const Expr& e) {
  out << "(" << static_cast<int>(e.kind) << ':' << static_cast<int>(e.type);
  if (!e.name.empty()) out << " '" << e.name << "'";
  switch (e.kind) {
    case Expr::Kind::NumberLiteral: out << " " << format_number(e.number); break;
    case Expr::Kind::Arithmetic: out << " " << e.op; break;
    case Expr::Kind::Lexicographic:
    case Expr::Kind::NumberCompare:
    case Expr::Kind::RelationCompare: out << " " << comparison_text(e.comparison); break;
    case Expr::Kind::Connective: out << " " << connective_text(e.connective); break;
    case Expr::Kind::Aggregate: out << " " << aggregate_text(e.aggregate); break;
    case Expr::Kind::Predefined:
    case Expr::Kind::Quantifier:
    case Expr::Kind::Closure: out << (e.flag ? " +" : " -"); break;
    default: break;
  }
  if (e.type == Type::Relation) {
    out << " {";
    for (const auto& f : e.free) out << ' ' << f;
    out << " }";
  }
  for (const auto& c : e.children) {
    out << ' ';
    dump_expr(out, *c);
  }
  out << ")";
}

void dump_statements(std::ostream& out, const std::vector<Statement>& list);

void dump_statement(std::ostream& out, const Statement& s) {
  out << "[" << static_cast<int>(s.kind) << " '" << s.name << "'";
  for (const auto& t : s.terms) {
    out << ' ';
    dump_expr(out, *t);
  }
  if (s.expr) {
    out << " = ";
    dump_expr(out, *s.expr);
  }
  for (const auto& item : s.items) {
    out << " <" << static_cast<int>(item.kind);
    if (item.prefix) dump_expr(out, *item.prefix);
    if (item.expr) dump_expr(out, *item.expr);
    out << ">";
  }
  if (s.to_stderr) out << " stderr";
  if (s.target) dump_expr(out, *s.target);
  if (!s.body.empty()) dump_statements(out, s.body);
  if (s.has_else) {
    out << " else";
    dump_statements(out, s.orelse);
  }
  out << "]";
}

void dump_statements(std::ostream& out, const std::vector<Statement>& list) {
  out << "{";
  for (const auto& s : list) dump_statement(out, s);
  out << "}";
}

}  // namespace

std::string to_source(const Expr& expr) { return Printer().expr(expr); }

std::string to_source(const Program& program) {
  Printer p;
  p.statements(program.statements, 0);
  return p.str();
}

std::string dump(const Expr& expr) {
  std::ostringstream out;
  dump_expr(out, expr);
  return out.str();
}

std::string dump(const Program& program) {
  std::ostringstream out;
  dump_statements(out, program.statements);
  return out.str();
}

}  // namespace crocopat::ast
