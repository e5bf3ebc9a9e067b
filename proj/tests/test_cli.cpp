#include <gtest/gtest.h>

#include "support.hpp"

using testing_support::run_program;

namespace {

testing_support::RunResult run_args(std::vector<std::string> args, const std::string& in = "") {
  std::vector<std::string> argv{"crocopat"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::vector<const char*> raw;
  for (const auto& a : argv) raw.push_back(a.c_str());
  std::istringstream input(in);
  std::ostringstream out, err;
  testing_support::RunResult r;
  r.status = crocopat::run_cli(static_cast<int>(raw.size()), raw.data(), input, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST(Cli, HelpAndVersion) {
  auto h = run_args({"-h"});
  EXPECT_EQ(h.status, 0);
  for (const char* opt : {"-e", "-m NUMBER", "-q", "-h", "-v"}) {
    EXPECT_NE(h.out.find(opt), std::string::npos) << opt;
  }
  EXPECT_NE(h.out.find("Display help message and exit"), std::string::npos);
  EXPECT_NE(h.out.find("Approximate memory for BDD package in MB"), std::string::npos);
  auto v = run_args({"-v"});
  EXPECT_EQ(v.status, 0);
  EXPECT_NE(v.out.find("crocopat"), std::string::npos);
  EXPECT_NE(v.out.find(crocopat::kVersion), std::string::npos);
}

TEST(Cli, UsageErrors) {
  for (auto args : std::vector<std::vector<std::string>>{
           {}, {"-x"}, {"-m"}, {"-m", "0"}, {"-m", "-3"}, {"-m", "1.5"}, {"-m", "abc"}}) {
    auto r = run_args(args);
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.err.find("Usage:"), std::string::npos);
  }
  auto missing = run_args({"/nonexistent/prog.rml"});
  EXPECT_EQ(missing.status, 1);
  EXPECT_NE(missing.err.find("Error:"), std::string::npos);
}

TEST(Cli, ArgumentsAfterFileArePassedThrough) {
  auto r = run_program("PRINT argCount, \" \", $1, \" \", $2;", "", {}, {"Joe", "-q"});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "2 Joe -q");
}

TEST(Cli, OptionOrderIndependent) {
  auto a = run_program("PRINT #(X(x));", "", {"-q", "-m", "10"});
  auto b = run_program("PRINT #(X(x));", "", {"-m", "10", "-q"});
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, "");
  EXPECT_EQ(b.err, "");
}

TEST(Cli, SkipInputFlag) {
  auto r = run_program("PRINT R(x);", "R a\n", {"-e"});
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "");
  EXPECT_NE(r.err.find("Warning"), std::string::npos);
  auto s = run_program("PRINT R(x);", "R a\n");
  EXPECT_EQ(s.out, "a\n");
}

TEST(Cli, RsfErrorsAreReported) {
  auto r = run_program("PRINT 1;", "R \"a\n");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("Error: RSF line 1"), std::string::npos) << r.err;
  auto arity = run_program("PRINT 1;", "R a\nR a b\n");
  EXPECT_EQ(arity.status, 1);
  EXPECT_NE(arity.err.find("Error:"), std::string::npos);
}

TEST(Cli, ErrorsCarryFileAndPosition) {
  auto r = run_program("PRINT 1;\nR(x) := ;", "");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find(".rml:2:9: Error: "), std::string::npos) << r.err;
}

TEST(Cli, ExitStatusClamped) {
  EXPECT_EQ(run_program("EXIT 3;", "").status, 3);
  EXPECT_EQ(run_program("EXIT 300;", "").status, 255);
  EXPECT_EQ(run_program("EXIT -1;", "").status, 0);
  EXPECT_EQ(run_program("EXIT 2.9;", "").status, 2);
}
