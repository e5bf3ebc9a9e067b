#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "crocopat/ast.hpp"
#include "crocopat/relation.hpp"

namespace crocopat {

struct InterpreterOptions {
  bool quiet = false;
  std::vector<std::string> arguments;
  std::string program_name;  // prefix for warnings
};

class Interpreter {
 public:
  Interpreter(RelationEngine& engine, std::ostream& out, std::ostream& err,
              InterpreterOptions options = {});
  ~Interpreter();

  /// Stores a relation under its internal attributes (used for RSF input).
  void define(const std::string& name, Relation value);
  const Relation* relation(const std::string& name) const;
  const std::unordered_map<std::string, Relation>& relations() const { return relations_; }

  /// Runs the statements; returns the EXIT status or 0. Errors propagate as
  /// exceptions derived from Error.
  int run(const ast::Program& program);

  // Expression evaluation, exposed for tests.
  Relation eval_relation(const ast::Expr& e, AttributeOrderLog& log);
  std::string eval_string(const ast::Expr& e);
  double eval_number(const ast::Expr& e);

 private:
  struct ExitRequest {
    int status;
  };

  void execute(const std::vector<ast::Statement>& list);
  void execute(const ast::Statement& s);
  void print(const ast::Statement& s);
  Term term(const ast::Expr& e);
  std::vector<Term> terms(const std::vector<ast::ExprPtr>& list, std::size_t from = 0);
  bool condition(const ast::Expr& e);
  void warn(const std::string& message, Position pos);
  void flush_all();
  std::ostream& file(const std::string& name, Position pos);

  RelationEngine& engine_;
  std::ostream& out_;
  std::ostream& err_;
  InterpreterOptions options_;
  std::unordered_map<std::string, Relation> relations_;
  std::unordered_map<std::string, std::string> strings_;
  std::unordered_map<std::string, double> numbers_;
  double exit_status_ = 0;
  std::set<std::pair<int, int>> warned_;
  std::map<std::string, std::unique_ptr<std::ofstream>> files_;
};

}  // namespace crocopat
