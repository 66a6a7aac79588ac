#include <gtest/gtest.h>

#include "generators.hpp"
#include "mpsa/mpsa.hpp"

using namespace mpsa;

namespace {

const char* kDisplayed =
    "mu A. ([1] (mu B. ([2] A /\\ [3] mu C. ([4] B /\\ [2] ([1] C /\\ [4] A)))) /\\ "
    "[3] (mu D. ([4] A /\\ [1] mu E. ([2] D /\\ [4] ([2] A /\\ [3] E)))))";

PacketAutomaton from_edges(int states, const std::vector<std::tuple<int, int, std::string>>& es) {
  PacketAutomaton a;
  a.states = states;
  for (const auto& [f, t, l] : es) {
    AutomatonPacket p;
    p.action = act::label(l);
    a.edges.push_back({f, t, p});
  }
  return a;
}

std::vector<Formula> two_loops() { return {parse_formula("mu X. [1][2] X"), parse_formula("mu Y. [3][4] Y")}; }

}  // namespace

TEST(Automaton, FromFormula) {
  auto loop = formula_to_automaton(parse_formula("mu X. [1][2] X"));
  EXPECT_EQ(loop.states, 2);
  EXPECT_EQ(loop.edges.size(), 2u);
  auto t = formula_to_automaton(fml::tt());
  EXPECT_EQ(t.states, 1);
  EXPECT_TRUE(t.edges.empty());
  auto one = formula_to_automaton(parse_formula("[1] true"));
  EXPECT_EQ(one.states, 2);
  ASSERT_EQ(one.edges.size(), 1u);
  EXPECT_NE(one.edges[0].from, one.edges[0].to);
}

TEST(Automaton, PacketsKeepPredicatesAndUpdates) {
  auto a = formula_to_automaton(parse_formula("mu X. forall y:Nat. [s[p,q]!(y)] (y > 0 /\\ [<@x++>] X)"));
  EXPECT_EQ(a.states, 1);
  ASSERT_EQ(a.edges.size(), 1u);
  EXPECT_EQ(a.edges[0].packet.kind, PacketKind::Output);
  EXPECT_TRUE(a.edges[0].packet.update.has_value());
}

TEST(Automaton, Product) {
  auto a = formula_to_automaton(parse_formula("mu X. [1][2] X"));
  auto b = formula_to_automaton(parse_formula("mu Y. [3][4] Y"));
  auto p = product(a, b);
  EXPECT_EQ(p.states, 4);
  EXPECT_TRUE(bisimilar(product(a, formula_to_automaton(fml::tt())), a));
  EXPECT_TRUE(bisimilar(p, product(b, a)));
  try {
    product(a, a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "automata.names");
  }
}

TEST(Automaton, ExpansionOfTheDiamond) {
  auto p = product(formula_to_automaton(parse_formula("mu X. [1][2] X")),
                   formula_to_automaton(parse_formula("mu Y. [3][4] Y")));
  auto e = expand_to_branch(p);
  EXPECT_EQ(e.states, 7);
  EXPECT_TRUE(is_branch_form(e));
  EXPECT_TRUE(bisimilar(e, p));
}

TEST(Automaton, ExpansionFixedPoints) {
  auto tree = from_edges(4, {{0, 1, "a"}, {0, 2, "b"}, {2, 3, "c"}});
  auto et = expand_to_branch(tree);
  EXPECT_EQ(et.states, 4);
  EXPECT_TRUE(bisimilar(et, tree));
  auto cycle = from_edges(3, {{0, 1, "a"}, {1, 2, "b"}, {2, 0, "c"}});
  auto ec = expand_to_branch(cycle);
  EXPECT_EQ(ec.states, 3);
  EXPECT_TRUE(bisimilar(ec, cycle));
}

TEST(Automaton, BackToFormula) {
  EXPECT_EQ(automaton_to_formula(formula_to_automaton(fml::tt())), fml::tt());
  auto loop = automaton_to_formula(formula_to_automaton(parse_formula("mu X. [1][2] X")));
  EXPECT_TRUE(bisimilar(formula_to_automaton(loop), formula_to_automaton(parse_formula("mu Z. [1][2] Z"))));
}

TEST(Automaton, Bisimilarity) {
  auto a = from_edges(2, {{0, 1, "a"}, {1, 0, "a"}});
  auto b = from_edges(1, {{0, 0, "a"}});
  auto c = from_edges(2, {{0, 1, "a"}});
  EXPECT_TRUE(bisimilar(a, b));
  EXPECT_FALSE(bisimilar(a, c));
}

TEST(Interleave, TwoLoops) {
  auto r = rec_interleave(two_loops());
  EXPECT_EQ(r.component_states, (std::vector<int>{2, 2}));
  EXPECT_EQ(r.product_states, 4);
  EXPECT_EQ(r.expanded_states, 7);
  auto displayed = formula_to_automaton(parse_formula(kDisplayed));
  EXPECT_TRUE(bisimilar(formula_to_automaton(r.formula), displayed));
  EXPECT_TRUE(bisimilar(formula_to_automaton(r.formula), r.expanded));
}

TEST(Interleave, DegenerateEnvironments) {
  auto one = rec_interleave(std::vector<Formula>{parse_formula("mu X. [1] X")});
  EXPECT_TRUE(bisimilar(formula_to_automaton(one.formula), formula_to_automaton(parse_formula("mu X. [1] X"))));
  EXPECT_EQ(rec_interleave(SessionEnv{}).formula, fml::tt());
  auto embedded = rec_interleave(SessionEnv{{{"s", "p"}, parse_assertion("mu t{w: true}(i:Nat). q!{ l(y:Nat){true}<skip>. t(w: true) } : true")}});
  EXPECT_EQ(embedded.component_states, std::vector<int>{1});
}

TEST(Interleave, Dot) {
  auto dot = to_dot(formula_to_automaton(parse_formula("mu X. [1][2] X")), "loop");
  EXPECT_NE(dot.find("digraph loop"), std::string::npos);
  EXPECT_NE(dot.find("->"), std::string::npos);
}

TEST(AutomatonProperties, RandomAutomataSurviveExpansionAndRetranslation) {
  gen::Rng r(707);
  for (int i = 0; i < 60; ++i) {
    auto a = gen::random_automaton(r, 8, "abc");
    PacketAutomaton e;
    try {
      e = expand_to_branch(a, 2000);
    } catch (const Error& err) {
      ASSERT_EQ(err.code(), "automata.budget");
      continue;
    }
    EXPECT_TRUE(is_branch_form(e));
    EXPECT_TRUE(bisimilar(e, a));
    EXPECT_TRUE(bisimilar(formula_to_automaton(automaton_to_formula(e)), e));
  }
}
