#include "crocopat/interpreter.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "crocopat/numbers.hpp"
#include "crocopat/rsf.hpp"

namespace crocopat {

using ast::Expr;
using ast::Statement;

namespace {

// Engine errors carry no position; attach the one of the construct at hand.
template <typename Fn>
auto at(Position pos, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const RuntimeError& e) {
    if (e.position().line != 0) throw;
    throw RuntimeError(e.what(), pos);
  }
}

}  // namespace

Interpreter::Interpreter(RelationEngine& engine, std::ostream& out, std::ostream& err,
                         InterpreterOptions options)
    : engine_(engine), out_(out), err_(err), options_(std::move(options)) {}

Interpreter::~Interpreter() = default;

void Interpreter::define(const std::string& name, Relation value) {
  relations_.insert_or_assign(name, std::move(value));
}

const Relation* Interpreter::relation(const std::string& name) const {
  auto it = relations_.find(name);
  return it == relations_.end() ? nullptr : &it->second;
}

int Interpreter::run(const ast::Program& program) {
  int status = 0;
  try {
    execute(program.statements);
  } catch (const ExitRequest& exit) {
    status = exit.status;
  }
  flush_all();
  return status;
}

void Interpreter::warn(const std::string& message, Position pos) {
  if (options_.quiet || !warned_.emplace(pos.line, pos.column).second) return;
  if (!options_.program_name.empty()) {
    err_ << options_.program_name << ':' << pos.line << ':' << pos.column << ": ";
  }
  err_ << "Warning: " << message << '\n';
  err_.flush();
}

void Interpreter::flush_all() {
  out_.flush();
  err_.flush();
  for (auto& [name, stream] : files_) stream->flush();
}

std::ostream& Interpreter::file(const std::string& name, Position pos) {
  auto it = files_.find(name);
  if (it == files_.end()) {
    auto stream = std::make_unique<std::ofstream>(name, std::ios::app);
    if (!*stream) throw RuntimeError("cannot open file '" + name + "' for writing", pos);
    it = files_.emplace(name, std::move(stream)).first;
  }
  return *it->second;
}

// ------------------------------------------------------------ statements

void Interpreter::execute(const std::vector<Statement>& list) {
  for (const auto& s : list) execute(s);
}

bool Interpreter::condition(const Expr& e) {
  AttributeOrderLog log;
  return eval_relation(e, log).root.is_true();
}

void Interpreter::execute(const Statement& s) {
  at(s.pos, [&] {
    switch (s.kind) {
      case Statement::Kind::RelAssign: {
        AttributeOrderLog log;
        Relation value = eval_relation(*s.expr, log);
        std::vector<Term> lhs;
        for (const auto& t : s.terms) {
          lhs.push_back(t->kind == Expr::Kind::Attribute ? Term::attribute(t->name)
                                                        : Term::constant(t->name));
        }
        const Relation* old = relation(s.name);
        Relation next = engine_.assign(old, lhs, value);
        define(s.name, std::move(next));
        break;
      }
      case Statement::Kind::StringAssign:
        strings_[s.name] = eval_string(*s.expr);
        break;
      case Statement::Kind::NumberAssign:
        numbers_[s.name] = eval_number(*s.expr);
        break;
      case Statement::Kind::If:
        if (condition(*s.expr)) {
          execute(s.body);
        } else {
          execute(s.orelse);
        }
        break;
      case Statement::Kind::While:
        while (condition(*s.expr)) execute(s.body);
        break;
      case Statement::Kind::For: {
        AttributeOrderLog log;
        Relation set = eval_relation(*s.expr, log);
        for (const auto& row : engine_.enumerate_strings(set)) {
          strings_[s.name] = row.front();
          execute(s.body);
        }
        break;
      }
      case Statement::Kind::Print:
        print(s);
        break;
      case Statement::Kind::Exec: {
        std::string command = eval_string(*s.expr);
        flush_all();
        int rc = std::system(command.c_str());
        if (rc == -1) throw RuntimeError("cannot run shell command '" + command + "'", s.pos);
        if (WIFEXITED(rc)) {
          exit_status_ = WEXITSTATUS(rc);
        } else if (WIFSIGNALED(rc)) {
          exit_status_ = 128 + WTERMSIG(rc);
        } else {
          exit_status_ = rc;
        }
        break;
      }
      case Statement::Kind::Exit: {
        double v = eval_number(*s.expr);
        int status = 255;
        if (!std::isnan(v)) status = static_cast<int>(std::clamp(std::trunc(v), 0.0, 255.0));
        throw ExitRequest{status};
      }
      case Statement::Kind::Block:
        execute(s.body);
        break;
    }
  });
}

void Interpreter::print(const Statement& s) {
  std::string text;
  const Universe& universe = engine_.universe();
  auto tuples = [&](const Relation& r, const std::optional<std::string>& prefix) {
    engine_.for_each_tuple(r, [&](const std::vector<std::size_t>& tuple) {
      std::vector<rsf::Element> elements;
      for (auto i : tuple) elements.push_back({universe.at(i), universe.quoted(i)});
      text += rsf::serialize_tuple(prefix, elements);
    });
  };
  for (const auto& item : s.items) {
    switch (item.kind) {
      case ast::PrintItem::Kind::Endl:
        text += '\n';
        break;
      case ast::PrintItem::Kind::RelInfo: {
        AttributeOrderLog log;
        Relation r = eval_relation(*item.expr, log);
        text += format_relinfo(engine_.relinfo(r));
        break;
      }
      case ast::PrintItem::Kind::Prefixed: {
        std::string prefix = eval_string(*item.prefix);
        AttributeOrderLog log;
        tuples(eval_relation(*item.expr, log), prefix);
        break;
      }
      case ast::PrintItem::Kind::Value:
        switch (item.expr->type) {
          case ast::Type::Relation: {
            AttributeOrderLog log;
            tuples(eval_relation(*item.expr, log), std::nullopt);
            break;
          }
          case ast::Type::String: text += eval_string(*item.expr); break;
          case ast::Type::Number: text += format_number(eval_number(*item.expr)); break;
          default: throw RuntimeError("cannot print this expression", item.pos);
        }
        break;
    }
  }
  std::ostream* sink = &out_;
  if (s.to_stderr) {
    sink = &err_;
  } else if (s.target) {
    sink = &file(eval_string(*s.target), s.target->pos);
  }
  *sink << text;
  if (sink == &out_ || sink == &err_) sink->flush();
  if (!*sink) throw RuntimeError("write error", s.pos);
}

// ------------------------------------------------------------ expressions

Term Interpreter::term(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Attribute: return Term::attribute(e.name);
    case Expr::Kind::Anonymous: return Term::anonymous();
    default: return Term::constant(eval_string(e));
  }
}

std::vector<Term> Interpreter::terms(const std::vector<ast::ExprPtr>& list, std::size_t from) {
  std::vector<Term> out;
  for (std::size_t i = from; i < list.size(); ++i) out.push_back(term(*list[i]));
  return out;
}

Relation Interpreter::eval_relation(const Expr& e, AttributeOrderLog& log) {
  return at(e.pos, [&]() -> Relation {
    switch (e.kind) {
      case Expr::Kind::Atom: {
        auto args = terms(e.children);
        const Relation* stored = relation(e.name);
        if (stored == nullptr) {
          warn("relation variable '" + e.name + "' is used before it is defined", e.pos);
          return engine_.atom(engine_.empty(args.size()), args, log);
        }
        if (stored->arity() != args.size()) {
          throw RuntimeError("relation variable '" + e.name + "' has arity " +
                                 std::to_string(stored->arity()) + " but is used with " +
                                 std::to_string(args.size()) + " terms",
                             e.pos);
        }
        return engine_.atom(*stored, args, log);
      }
      case Expr::Kind::Predefined:
        return engine_.predefined(e.flag, terms(e.children), log);
      case Expr::Kind::Lexicographic: {
        Term left = term(*e.children[0]);
        Term right = term(*e.children[1]);
        return engine_.lexicographic(e.comparison, left, right, log);
      }
      case Expr::Kind::Regex: {
        std::string pattern = eval_string(*e.children[0]);
        return engine_.regex(pattern, term(*e.children[1]), log);
      }
      case Expr::Kind::Not:
        return engine_.negate(eval_relation(*e.children[0], log));
      case Expr::Kind::Connective: {
        Relation left = eval_relation(*e.children[0], log);
        Relation right = eval_relation(*e.children[1], log);
        return engine_.combine(e.connective, left, right);
      }
      case Expr::Kind::Quantifier: {
        Relation body = eval_relation(*e.children[0], log);
        return e.flag ? engine_.forall({e.name}, body) : engine_.exists({e.name}, body);
      }
      case Expr::Kind::Closure: {
        Relation body = eval_relation(*e.children[0], log);
        const auto& free = e.children[0]->free;
        return e.flag ? engine_.transitive_closure_squaring(body, free[0], free[1], log)
                      : engine_.transitive_closure(body, free[0], free[1]);
      }
      case Expr::Kind::NumberCompare: {
        double left = eval_number(*e.children[0]);
        double right = eval_number(*e.children[1]);
        return engine_.boolean(compare_numbers(e.comparison, left, right));
      }
      case Expr::Kind::RelationCompare: {
        Relation left = eval_relation(*e.children[0], log);
        Relation right = eval_relation(*e.children[1], log);
        return engine_.compare(e.comparison, left, right);
      }
      default:
        throw RuntimeError("not a relational expression", e.pos);
    }
  });
}

std::string Interpreter::eval_string(const Expr& e) {
  return at(e.pos, [&]() -> std::string {
    switch (e.kind) {
      case Expr::Kind::StringLiteral: return e.name;
      case Expr::Kind::StringVar: {
        auto it = strings_.find(e.name);
        if (it == strings_.end()) {
          throw RuntimeError("string variable '" + e.name + "' is used before it is defined", e.pos);
        }
        return it->second;
      }
      case Expr::Kind::Concat: return eval_string(*e.children[0]) + eval_string(*e.children[1]);
      case Expr::Kind::StringOf: return format_number(eval_number(*e.children[0]));
      case Expr::Kind::Argument: {
        double n = eval_number(*e.children[0]);
        const auto count = options_.arguments.size();
        if (!(n >= 0.5 && n < static_cast<double>(count) + 0.5)) {
          throw RuntimeError("command line argument $" + format_number(n) +
                                 " does not exist (argCount is " + std::to_string(count) + ")",
                             e.pos);
        }
        return options_.arguments[static_cast<std::size_t>(std::llround(n)) - 1];
      }
      default:
        throw RuntimeError("not a string expression", e.pos);
    }
  });
}

double Interpreter::eval_number(const Expr& e) {
  return at(e.pos, [&]() -> double {
    switch (e.kind) {
      case Expr::Kind::NumberLiteral: return e.number;
      case Expr::Kind::NumberVar: {
        auto it = numbers_.find(e.name);
        if (it == numbers_.end()) {
          throw RuntimeError("numerical variable '" + e.name + "' is used before it is defined",
                             e.pos);
        }
        return it->second;
      }
      case Expr::Kind::ArgCount: return static_cast<double>(options_.arguments.size());
      case Expr::Kind::ExitStatus: return exit_status_;
      case Expr::Kind::NumberOf: return parse_number(eval_string(*e.children[0]));
      case Expr::Kind::Cardinality: {
        AttributeOrderLog log;
        return engine_.cardinality(eval_relation(*e.children[0], log));
      }
      case Expr::Kind::Aggregate: {
        AttributeOrderLog log;
        return engine_.aggregate(e.aggregate, eval_relation(*e.children[0], log));
      }
      case Expr::Kind::Negative: return -eval_number(*e.children[0]);
      case Expr::Kind::Arithmetic: {
        double a = eval_number(*e.children[0]);
        double b = eval_number(*e.children[1]);
        switch (e.op) {
          case '+': return a + b;
          case '-': return a - b;
          case '*': return a * b;
          case '^': return std::pow(a, b);
          default: break;
        }
        if (b == 0) throw RuntimeError("division by zero", e.pos);
        if (e.op == '/') return a / b;
        if (e.op == 'd') return std::trunc(a / b);
        return std::fmod(a, b);
      }
      default:
        throw RuntimeError("not a numerical expression", e.pos);
    }
  });
}

}  // namespace crocopat
