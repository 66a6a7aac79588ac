#include <gtest/gtest.h>

#include "generators.hpp"
#include "mpsa/mpsa.hpp"

using namespace mpsa;

namespace {

// Replaces every predicate by `true` and every update by `skip`.
LocalAssertion trivialise(const LocalAssertion& l) {
  return std::visit(
      [&](const auto& n) -> LocalAssertion {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LSelect> || std::is_same_v<T, LBranch>) {
          T out = n;
          for (auto& b : out.branches) {
            b.pred = Expr::boolean(true);
            b.update = Update::skip();
            b.cont = trivialise(b.cont);
          }
          return LocalAssertion(AssertionNode{out});
        } else if constexpr (std::is_same_v<T, LRec>) {
          LRec out = n;
          out.body = trivialise(n.body);
          return LocalAssertion(AssertionNode{out});
        } else {
          return l;
        }
      },
      l.node().v);
}

// The communication skeleton: predicates, hypotheses and update modalities
// dropped.
Formula skeleton(const Formula& f) {
  return std::visit(
      [&](const auto& n) -> Formula {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FPred>) {
          return fml::tt();
        } else if constexpr (std::is_same_v<T, FAnd>) {
          Formula l = skeleton(n.lhs), r = skeleton(n.rhs);
          if (l == fml::tt()) return r;
          if (r == fml::tt()) return l;
          return fml::conj(l, r);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return skeleton(n.concl);
        } else if constexpr (std::is_same_v<T, FMust>) {
          if (std::holds_alternative<UpdateAction>(n.action.v)) return skeleton(n.body);
          return fml::must(n.action, skeleton(n.body));
        } else if constexpr (std::is_same_v<T, FForall>) {
          return fml::forall(n.var, n.sort, skeleton(n.body));
        } else if constexpr (std::is_same_v<T, FMu>) {
          return fml::mu(n.name, skeleton(n.body));
        } else {
          return f;
        }
      },
      f.node().v);
}

}  // namespace

TEST(Embed, CounterSender) {
  auto l = parse_assertion("C!{ l(y:Nat){y > 10 /\\ y == @x}<@x++>. end }");
  auto f = embed(l, "s", "S");
  EXPECT_EQ(print_formula(f), "forall y:Nat. [s[S,C]!(y)] ((y > 10 /\\ y == @x) /\\ [<@x++>] true)");
  auto want = fml::forall(
      "y", Sort::Nat,
      fml::must(act::output("s", "S", "C", Expr::var("y")),
                fml::conj(fml::pred(gt(Expr::var("y"), Expr::integer(10)) && eq(Expr::var("y"), Expr::state("x"))),
                          fml::must(act::update(Update::increment("x")), fml::tt()))));
  EXPECT_EQ(f, want);
}

TEST(Embed, EndAndBranching) {
  EXPECT_EQ(embed(la::end(), "s", "p"), fml::tt());
  auto f = embed(parse_assertion("q?{l(y:Int){y>0}<skip>. end}"), "s", "p");
  EXPECT_EQ(print_formula(f), "forall y:Int. [s[q,p]?(y)] (y > 0 => [<skip>] true)");
}

TEST(Embed, SharedNames) {
  RoleTable t;
  t["p"] = la::end();
  EXPECT_EQ(print_formula(embed_env_entry("a", t)), "forall s':Sess. [a(s'[p])] true");
  t["p"] = parse_assertion("q!{l(y:Nat){y>0}<skip>.end}");
  EXPECT_EQ(print_formula(embed_env_entry("a", t)),
            "forall s':Sess. [a(s'[p])] (forall y:Nat. [s'[p,q]!(y)] (y > 0 /\\ [<skip>] true))");
  try {
    embed_env_entry("a", {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "embedding.empty_table");
  }
}

TEST(Embed, Recursion) {
  auto l = parse_assertion("mu t{w: w == 0}(i:Nat). q!{ l(y:Nat){y >= i}<skip>. t(w: w == i + 1) } : i >= 0");
  EXPECT_EQ(print_formula(embed(l, "s", "p")),
            "forall i:Nat. i >= 0 => mu t. forall y:Nat. [s[p,q]!(y)] (y >= i /\\ [<skip>] t)");
}

TEST(EmbedProperties, PositiveDepthPreservingAndSkeletal) {
  gen::Rng r(404);
  gen::Endpoint e;
  e.vars = {"x", "z"};
  e.recursive = 0.3;
  for (int i = 0; i < 200; ++i) {
    auto in = gen::instance(r, e);
    auto f = embed(in.assertion, "s", "p");
    EXPECT_NO_THROW(check_formula(f)) << in.assertion_src;
    EXPECT_EQ(comm_depth(f), comm_depth(in.assertion)) << in.assertion_src;
    EXPECT_EQ(skeleton(embed(trivialise(in.assertion), "s", "p")), skeleton(f)) << in.assertion_src;
  }
}
