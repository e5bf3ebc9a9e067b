#include "crocopat/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "crocopat/ast.hpp"
#include "crocopat/bdd.hpp"
#include "crocopat/interpreter.hpp"
#include "crocopat/relation.hpp"
#include "crocopat/rsf.hpp"
#include "crocopat/syntax.hpp"

namespace crocopat {
namespace {

constexpr const char* kUsage = "Usage: crocopat [OPTION]... FILE [ARGUMENT]...\n";

constexpr const char* kHelp =
    "Usage: crocopat [OPTION]... FILE [ARGUMENT]...\n"
    "Reads relations in RSF from stdin (unless -e is given) and then executes\n"
    "the RML program FILE. The ARGUMENTs are passed to the program.\n"
    "\n"
    "Options:\n"
    "  -e         Do not read RSF data from stdin.\n"
    "  -m NUMBER  Approximate memory for BDD package in MB. The default is 50.\n"
    "  -q         Suppress warnings.\n"
    "  -h         Display help message and exit.\n"
    "  -v         Print version information and exit.\n";

struct Config {
  bool skip_rsf = false;
  bool quiet = false;
  std::size_t memory_mb = 50;
  std::string program;
  std::vector<std::string> arguments;
};

void report(std::ostream& err, const std::string& file, const Error& e) {
  Position pos = e.position();
  if (pos.line > 0) err << file << ':' << pos.line << ':' << pos.column << ": ";
  err << "Error: " << e.what() << '\n';
}

int execute(const Config& config, std::istream& in, std::ostream& out, std::ostream& err) {
  std::ifstream file(config.program, std::ios::binary);
  if (!file) {
    err << "Error: cannot open program file '" << config.program << "'\n";
    return 1;
  }
  std::stringstream source;
  source << file.rdbuf();

  try {
    syntax::Program parsed = syntax::parse(source.str());

    rsf::Stream stream;
    if (!config.skip_rsf) {
      try {
        stream = rsf::parse(in);
      } catch (const RsfError& e) {
        err << "Error: " << e.what() << '\n';
        return 1;
      }
    }
    // Group tuples per relation; arities must agree.
    std::map<std::string, std::pair<std::size_t, std::vector<std::vector<std::string>>>> input;
    for (const auto& t : stream.tuples) {
      std::vector<std::string> row;
      for (const auto& e : t.elements) row.push_back(e.text);
      auto [it, fresh] = input.try_emplace(t.relation, row.size(), std::vector<std::vector<std::string>>{});
      if (!fresh && it->second.first != row.size()) {
        err << "Error: RSF relation '" << t.relation << "' has tuples of arity "
            << it->second.first << " and " << row.size() << '\n';
        return 1;
      }
      it->second.second.push_back(std::move(row));
    }
    std::set<std::string> names;
    for (const auto& [name, rows] : input) names.insert(name);

    ast::Program program = ast::resolve(parsed, names);
    Universe universe = rsf::collect_universe(stream, program.lhs_literals);

    bdd::Manager manager(bdd::Manager::capacity_for_megabytes(config.memory_mb));
    RelationEngine engine(manager, std::move(universe));
    InterpreterOptions options;
    options.quiet = config.quiet;
    options.arguments = config.arguments;
    options.program_name = config.program;
    Interpreter interpreter(engine, out, err, options);
    for (auto& [name, rows] : input) {
      interpreter.define(name, engine.from_tuples(rows.first, rows.second));
    }
    return interpreter.run(program);
  } catch (const Error& e) {
    out.flush();
    report(err, config.program, e);
    return 1;
  } catch (const std::bad_alloc&) {
    out.flush();
    err << "Error: not enough memory for a BDD package of " << config.memory_mb << " MB\n";
    return 1;
  } catch (const std::exception& e) {
    out.flush();
    err << "Error: internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"RML interpreter", "crocopat"};
  app.set_help_flag();
  app.prefix_command();
  Config config;
  bool help = false;
  bool version = false;
  app.add_flag("-e", config.skip_rsf);
  app.add_flag("-q", config.quiet);
  app.add_flag("-h", help);
  app.add_flag("-v", version);
  app.add_option("-m", config.memory_mb)->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    err << "Error: " << e.what() << '\n' << kUsage;
    return 1;
  }
  if (help) {
    out << kHelp;
    return 0;
  }
  if (version) {
    out << "crocopat " << kVersion << '\n';
    return 0;
  }
  std::vector<std::string> rest = app.remaining();
  if (rest.empty()) {
    err << "Error: missing program FILE\n" << kUsage;
    return 1;
  }
  if (rest.front().size() > 1 && rest.front().front() == '-') {
    err << "Error: unknown option '" << rest.front() << "'\n" << kUsage;
    return 1;
  }
  config.program = rest.front();
  config.arguments.assign(rest.begin() + 1, rest.end());
  return execute(config, in, out, err);
}

}  // namespace crocopat
