#include <gtest/gtest.h>

#include "generators.hpp"
#include "mpsa/mpsa.hpp"

using namespace mpsa;

namespace {

const char* kCounter = "q!{ l(y:Nat){y>10 /\\ y==@x}<@x:=@x+1>. end }";

}  // namespace

TEST(Parse, CounterAssertion) {
  auto l = parse_assertion(kCounter);
  AssertionBranch b{"l", "y", Sort::Nat,
                    gt(Expr::var("y"), Expr::integer(10)) && eq(Expr::var("y"), Expr::state("x")),
                    Update::increment("x"), la::end()};
  EXPECT_EQ(l, la::select("q", {b}));
}

TEST(Parse, RecursiveAssertion) {
  auto l = parse_assertion("mu t {y: y==0}(x:Int). end : x>=0");
  EXPECT_EQ(l, la::rec("t", "x", Sort::Int, "y", eq(Expr::var("y"), Expr::integer(0)),
                       ge(Expr::var("x"), Expr::integer(0)), la::end()));
}

TEST(Parse, Processes) {
  EXPECT_EQ(parse_process("0"), proc::inact());
  auto sel = parse_process("s[p,q]!{ true :: l<11>(y)<@x:=@x+1>. 0 }");
  GuardedBranch g{Expr::boolean(true), "l", Expr::integer(11), "y", Update::increment("x"), proc::inact()};
  EXPECT_EQ(sel, proc::select("s", "p", "q", {g}));
  auto br = parse_process("s[q,p]?{ l(y)<skip>. 0 }");
  EXPECT_EQ(br, proc::branch("s", "q", "p", {InputBranch{"l", "y", std::nullopt, Update::skip(), proc::inact()}}));
}

TEST(Parse, Formulas) {
  EXPECT_EQ(parse_formula("true"), fml::tt());
  auto f = parse_formula("forall y:Nat. [s[p,q]!(y)]((y==@x) /\\ [<@x:=@x+1>] true)");
  auto want = fml::forall(
      "y", Sort::Nat,
      fml::must(act::output("s", "p", "q", Expr::var("y")),
                fml::conj(fml::pred(eq(Expr::var("y"), Expr::state("x"))),
                          fml::must(act::update(Update::increment("x")), fml::tt()))));
  EXPECT_EQ(f, want);
}

TEST(Parse, ModalityInAntecedentIsRejected) {
  try {
    parse_formula("(true => [l] true) => true");
    FAIL() << "accepted a modality in an antecedent";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "kernel.positivity");
  }
}

TEST(Parse, SyntaxErrorsCarryPositions) {
  try {
    parse_process("s[p,q]!{ true :: }");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "kernel.syntax");
    EXPECT_NE(std::string(e.what()).find("1:"), std::string::npos);
  }
}

TEST(Print, Basics) {
  EXPECT_EQ(print_assertion(la::end()), "end");
  EXPECT_EQ(print_formula(fml::conj(fml::tt(), fml::tt())), "true /\\ true");
  auto loop = fml::mu("X", fml::must(act::label("1"), fml::must(act::label("2"), fml::var("X"))));
  EXPECT_EQ(print_formula(loop), "mu X. [1][2] X");
}

TEST(Print, RoundTripsOnGeneratedTerms) {
  gen::Rng r(101);
  gen::Endpoint e;
  e.vars = {"x", "z"};
  e.recursive = 0.3;
  auto opts = gen::int_state(e.vars);
  for (int i = 0; i < 200; ++i) {
    auto in = gen::instance(r, e);
    EXPECT_EQ(parse_assertion(print_assertion(in.assertion), opts), in.assertion) << in.assertion_src;
    EXPECT_EQ(parse_process(print_process(in.process), opts), in.process) << in.process_src;
    auto f = embed(in.assertion, "s", "p");
    EXPECT_EQ(parse_formula(print_formula(f), opts), f) << print_formula(f);
  }
}

TEST(Names, FreeNamesSurvivePrinting) {
  gen::Rng r(202);
  gen::Endpoint e;
  auto opts = gen::int_state(e.vars);
  for (int i = 0; i < 100; ++i) {
    auto in = gen::instance(r, e);
    auto f = embed(in.assertion, "s", "p");
    EXPECT_EQ(free_names(parse_formula(print_formula(f), opts)), free_names(f));
    EXPECT_EQ(free_names(parse_process(print_process(in.process), opts)), free_names(in.process));
  }
}

TEST(Names, FreeNamesOfFormula) {
  auto f = parse_formula("forall k:Sess. [a(k[p])] [k[p,q]!l(3)] true /\\ [s[p,q]?m(1)] true");
  auto n = free_names(f);
  EXPECT_TRUE(n.count("a"));
  EXPECT_TRUE(n.count("s"));
  EXPECT_FALSE(n.count("k"));
}

TEST(Json, ExprShape) {
  auto j = to_json(parse_expr("@x + 1"));
  EXPECT_TRUE(j.is_object());
  EXPECT_NE(j.dump().find("\"x\""), std::string::npos);
}
