#include <gtest/gtest.h>

#include "mpsa/mpsa.hpp"

using namespace mpsa;

namespace {

const char* kSender = R"(# The sender of a counter.
precondition: @x > 10
state: @x: Int = 0 .. 15
delta: s[S]: C!{ l(y:Nat){y > 10 /\ y == @x}<@x++>. end }
sigma: @x = 11
)";

std::string code_of(std::string_view src) {
  try {
    parse_bundle(src);
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST(Bundle, Sender) {
  auto b = parse_bundle(kSender);
  EXPECT_EQ(print_expr(b.precondition), "@x > 10");
  ASSERT_EQ(b.state.count("x"), 1u);
  EXPECT_EQ(b.state_sorts.at("x"), Sort::Int);
  EXPECT_EQ(b.states().size(), 16u);
  ASSERT_EQ(b.delta.size(), 1u);
  EXPECT_EQ(b.delta.begin()->first, (SessionRole{"s", "S"}));
  ASSERT_TRUE(b.sigma.has_value());
  EXPECT_EQ(b.sigma->at("x"), Value{std::int64_t{11}});
  EXPECT_TRUE(b.delta_formulas.empty());
  EXPECT_EQ(b.delta_embedded().size(), 1u);
}

TEST(Bundle, FormulaEntriesAndContinuationLines) {
  auto b = parse_bundle("delta: s1[p1]: mu X. [1][2] X\ndelta: s2[p2]: mu Y.\n  [3][4] Y\n");
  EXPECT_TRUE(b.delta.empty());
  ASSERT_EQ(b.delta_formulas.size(), 2u);
  EXPECT_EQ(b.delta_formulas[1].formula, parse_formula("mu Y. [3][4] Y"));
}

TEST(Bundle, SharedTable) {
  auto b = parse_bundle("gamma: a -> { p: q!{ l(y:Nat){true}<skip>. end }; q: end }");
  ASSERT_EQ(b.gamma.count("a"), 1u);
  EXPECT_EQ(b.gamma.at("a").size(), 2u);
}

TEST(Bundle, Errors) {
  EXPECT_EQ(code_of("stray text\n"), "kernel.syntax");
  EXPECT_EQ(code_of("state: x Int\n"), "kernel.syntax");
  EXPECT_EQ(code_of("delta: s[p] end\n"), "kernel.syntax");
  EXPECT_EQ(code_of("gamma: a -> p: end\n"), "kernel.syntax");
  EXPECT_EQ(code_of("delta: s[p]: q!{ l(y:Nat){true}<skip>. \n"), "kernel.syntax");
}

TEST(State, Parse) {
  auto s = parse_state("@x = 5, @b = true");
  EXPECT_EQ(s.at("x"), Value{std::int64_t{5}});
  EXPECT_EQ(s.at("b"), Value{true});
  EXPECT_TRUE(parse_state("").empty());
  EXPECT_THROW(parse_state("@x 5"), Error);
}
