#include <gtest/gtest.h>

#include "support.hpp"

using testing_support::run_program;

namespace {

const char* kFamily =
    "ParentOf John Alice\nParentOf John Joe\nParentOf Mary Alice\nParentOf Mary Joe\n"
    "ParentOf Joe  Jane\n";

std::string out_of(const std::string& program, const std::string& rsf = kFamily,
                   std::vector<std::string> args = {}) {
  auto r = run_program(program, rsf, {}, std::move(args));
  EXPECT_EQ(r.status, 0) << r.err;
  return r.out;
}

}  // namespace

TEST(Interpreter, AssignmentsAndQuantifiers) {
  EXPECT_EQ(out_of("J(x) := ParentOf(x, \"Joe\"); PRINT J(x);"), "John\nMary\n");
  EXPECT_EQ(out_of("C(x,y) := ParentOf(y,x); PRINT C(\"Jane\", y);"), "Joe\n");
  EXPECT_EQ(out_of("P(x) := ParentOf(x,_); PRINT P(x);"), "Joe\nJohn\nMary\n");
  EXPECT_EQ(out_of("C(x) := FA(y, !ParentOf(x,y)); PRINT C(x);"), "Alice\nJane\n");
  EXPECT_EQ(out_of("S(x,y) := EX(z, ParentOf(z,x) & ParentOf(z,y)) & !=(x,y); PRINT S(x,y);"),
            "Alice Joe\nJoe Alice\n");
}

TEST(Interpreter, FactsGrowTheUniverse) {
  EXPECT_EQ(out_of("Male(\"John\"); Male(\"Bob\"); PRINT Male(x); PRINT #(TRUE(x));"),
            "Bob\nJohn\n6");
}

TEST(Interpreter, PrintFormats) {
  EXPECT_EQ(out_of("PRINT TRUE(); PRINT FALSE(); PRINT \"s\", 1, 2.5, 1/3, ENDL;"),
            "\ns12.50.3333333333333333\n");
  EXPECT_EQ(out_of("R(\"a b\", \"c\"); PRINT [\"R\"] R(x,y);", ""), "R \"a b\" c\n");
  EXPECT_EQ(out_of("PRINT 1e21, \" \", -0.5, \" \", 100000, \" \", 2^0.5;", ""),
            "1e+21 -0.5 100000 1.4142135623730951");
}

TEST(Interpreter, NumbersAndStrings) {
  EXPECT_EQ(out_of("PRINT 7 DIV 2, \" \", -7 DIV 2, \" \", 7 MOD 3, \" \", -2 ^ 2;", ""), "3 -3 1 4");
  EXPECT_EQ(out_of("s := \"x\" + STRING(3) + STRING(0.5); PRINT s, NUMBER(\"12\") + NUMBER(\"q\");", ""),
            "x30.512");
  EXPECT_EQ(out_of("PRINT argCount, $1, $(argCount);", "", {"a", "b"}), "2ab");
  auto r = run_program("PRINT 1 / 0;", "");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("Error"), std::string::npos);
  r = run_program("PRINT $3;", "", {}, {"a"});
  EXPECT_EQ(r.status, 1);
}

TEST(Interpreter, AggregatesAndCardinality) {
  EXPECT_EQ(out_of("PRINT #(ParentOf(x,y)), \" \", #(ParentOf(x,_));"), "5 3");
  EXPECT_EQ(out_of("V(\"1\"); V(\"4\"); V(\"x\"); PRINT MIN(V(x)), \" \", MAX(V(x)), \" \", SUM(V(x)), \" \", AVG(V(x));", ""),
            "0 4 5 1.6666666666666667");
  EXPECT_EQ(run_program("V(\"1\"); PRINT MIN(V(x) & x = \"2\");", "").status, 1);
}

TEST(Interpreter, ControlFlow) {
  EXPECT_EQ(out_of("IF ParentOf(\"Joe\", \"Jane\") { PRINT \"y\"; } ELSE { PRINT \"n\"; }"), "y");
  EXPECT_EQ(out_of("IF ParentOf(\"Jane\", \"Joe\") { PRINT \"y\"; } ELSE { PRINT \"n\"; }"), "n");
  EXPECT_EQ(out_of("n := 0; WHILE n < 3 { n := n + 1; PRINT n; }", ""), "123");
  EXPECT_EQ(out_of("FOR p IN ParentOf(p0, _) { PRINT p, \":\", #(ParentOf(p, x)), \" \"; }"),
            "Joe:1 John:2 Mary:2 ");
  EXPECT_EQ(out_of("PRINT 1; EXIT 0; PRINT 2;", ""), "1");
}

TEST(Interpreter, PartialUpdateDeletion) {
  EXPECT_EQ(out_of("ParentOf(\"Joe\",x) := FALSE(x); ParentOf(x,\"Joe\") := FALSE(x); "
                   "PRINT ParentOf(x,y);"),
            "John Alice\nMary Alice\n");
  EXPECT_EQ(out_of("F(\"John\", x) := ParentOf(\"John\", x); F(\"Joe\", x) := ParentOf(\"Joe\", x); "
                   "PRINT F(x,y);"),
            "Joe Jane\nJohn Alice\nJohn Joe\n");
}

TEST(Interpreter, UndefinedRelationWarnsOnceAndIsEmpty) {
  auto r = run_program("FOR i IN TRUE(x) { PRINT #(Nope(y)); }", "R a\nR b\n");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "00");
  auto ls = testing_support::lines(r.err);
  ASSERT_EQ(ls.size(), 1u);
  EXPECT_NE(ls[0].find("1:28: Warning: relation variable 'Nope' is used before it is defined"),
            std::string::npos)
      << ls[0];
  auto q = run_program("PRINT #(Nope(y));", "", {"-q"});
  EXPECT_EQ(q.err, "");
  EXPECT_EQ(run_program("PRINT s;", "").status, 1);
}

TEST(Interpreter, ClosureVariants) {
  const char* graph = "R a b\nR b c\nR c a\nR c d\n";
  std::string expect = out_of("PRINT TC(R(x,y));", graph);
  EXPECT_EQ(testing_support::lines(expect).size(), 3u * 4u);
  EXPECT_EQ(out_of("PRINT TCFAST(R(x,y));", graph), expect);
  EXPECT_EQ(out_of("T(y,x) := TC(R(y,x)); PRINT T(x,y);", graph), expect);
  // Source is the first free attribute in textual order.
  EXPECT_EQ(out_of("PRINT TC(R(y,x) & TRUE(x,y));", graph), expect);
}

TEST(Interpreter, RegexAndComparisonOperators) {
  EXPECT_EQ(out_of("S(x) := @\"^J\"(x); PRINT S(x);"), "Jane\nJoe\nJohn\n");
  EXPECT_EQ(out_of("P := \"a\"; PRINT @(\"^\" + \"M\")(x);"), "Mary\n");
  EXPECT_EQ(out_of("PRINT (x < \"Joe\") & (x > \"Alice\");"), "Jane\n");
  EXPECT_EQ(out_of("IF \"A\" = \"A\" { PRINT 1; } ELSE { PRINT 0; }"), "0");
  EXPECT_EQ(out_of("IF \"Joe\" = \"Joe\" { PRINT 1; } ELSE { PRINT 0; }"), "1");
}

TEST(Interpreter, PrintToFileAppends) {
  auto path = testing_support::scratch_dir() / "append_target.rsf";
  std::filesystem::remove(path);
  std::string p = path.string();
  out_of("PRINT [\"P\"] ParentOf(\"Joe\", x) TO \"" + p + "\"; PRINT \"x\", ENDL TO \"" + p + "\";");
  out_of("PRINT \"y\", ENDL TO \"" + p + "\";");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "P Jane\nx\ny\n");
}

TEST(Interpreter, ExecSetsExitStatus) {
  EXPECT_EQ(out_of("EXEC \"exit 3\"; PRINT exitStatus;", ""), "3");
  EXPECT_EQ(out_of("PRINT exitStatus;", ""), "0");
}

TEST(Interpreter, RuntimeErrorsReportPosition) {
  auto r = run_program("R(x) := TRUE(x);\nPRINT R(x,y);", "A b\n");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("Error: "), std::string::npos);
}
