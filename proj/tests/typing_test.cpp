#include <gtest/gtest.h>

#include "generators.hpp"
#include "mpsa/mpsa.hpp"

using namespace mpsa;

namespace {

const char* kCounter = "q!{ l(y:Nat){y > 10 /\\ y == @x}<@x++>. end }";

std::map<std::string, Domain> counter_domain() { return {{"x", Domain::range(0, 31)}}; }

}  // namespace

TEST(Erase, DropsPredicatesUpdatesAndParameters) {
  EXPECT_EQ(print_utype(erase(parse_assertion(kCounter))), "q!{l(Nat).end}");
  EXPECT_EQ(print_utype(erase(la::end())), "end");
  auto rec = erase(parse_assertion("mu t{y: y == 0}(x:Int). q!{ l(z:Nat){z > x}<skip>. t(y: y == x) } : x >= 0"));
  EXPECT_EQ(print_utype(rec), "mu t. q!{l(Nat).t}");
}

TEST(Erase, CommutesWithEnvironmentUnion) {
  gen::Rng r(606);
  gen::Endpoint a, b;
  b.session = "k";
  b.label_prefix = "m";
  for (int i = 0; i < 50; ++i) {
    auto x = gen::instance(r, a), y = gen::instance(r, b);
    SessionEnv both{{{"s", "p"}, x.assertion}, {{"k", "p"}, y.assertion}};
    USessionEnv joined = erase_env(SessionEnv{{{"s", "p"}, x.assertion}});
    for (const auto& [k, t] : erase_env(SessionEnv{{{"k", "p"}, y.assertion}})) joined[k] = t;
    EXPECT_EQ(erase_env(both), joined);
  }
}

TEST(Unasserted, Judgements) {
  EXPECT_TRUE(typecheck_unasserted(proc::inact(), {{{"s", "p"}, UType{}}}).ok);
  auto sender = parse_process("s[p,q]!{ true :: l<11>(y)<@x++>. 0 }");
  USessionEnv good{{{"s", "p"}, erase(parse_assertion("q!{ l(y:Nat){true}<skip>. end }"))}};
  auto r = typecheck_unasserted(sender, good);
  EXPECT_TRUE(r.ok) << r.reason;
  EXPECT_FALSE(r.derivation.empty());
  USessionEnv flipped{{{"s", "p"}, erase(parse_assertion("q?{ l(y:Nat){true}<skip>. end }"))}};
  EXPECT_FALSE(typecheck_unasserted(sender, flipped).ok);
}

TEST(Unasserted, Rejections) {
  USessionEnv one{{{"s", "p"}, erase(parse_assertion("q!{ l(y:Nat){true}<skip>. end }"))}};
  EXPECT_FALSE(typecheck_unasserted(proc::inact(), one).ok) << "unfinished session";
  auto other_label = parse_process("s[p,q]!{ true :: m<1>(y)<skip>. 0 }");
  EXPECT_FALSE(typecheck_unasserted(other_label, one).ok);
  auto other_session = parse_process("k[p,q]!{ true :: l<1>(y)<skip>. 0 }");
  EXPECT_FALSE(typecheck_unasserted(other_session, one).ok);
  auto bool_payload = parse_process("s[p,q]!{ true :: l<true>(y)<skip>. 0 }");
  EXPECT_FALSE(typecheck_unasserted(bool_payload, one).ok);
}

TEST(Unasserted, SharedNames) {
  SharedEnv gamma{{"a", {{"p", parse_assertion(kCounter)}}}};
  auto joiner = parse_process("acc a[p](k). k[p,q]!{ true :: l<11>(y)<skip>. 0 }");
  EXPECT_TRUE(typecheck_unasserted(joiner, {}, gamma).ok);
  EXPECT_FALSE(typecheck_unasserted(joiner, {}, {}).ok);
}

TEST(Asserted, CounterSender) {
  EXPECT_TRUE(prove_asserted(Expr::boolean(true), {}, {{{"s", "p"}, la::end()}}, proc::inact(), {}).ok);

  SessionEnv delta{{{"s", "p"}, parse_assertion(kCounter)}};
  auto sender = parse_process("s[p,q]!{ true :: l<@x>(y)<@x++>. 0 }");
  auto ok = prove_asserted(parse_expr("@x > 10"), {}, delta, sender, counter_domain());
  EXPECT_TRUE(ok.ok) << ok.reason;

  auto bad = prove_asserted(Expr::boolean(true), {}, delta, sender, counter_domain());
  ASSERT_FALSE(bad.ok);
  EXPECT_NE(bad.reason.find("$x = 0"), std::string::npos) << bad.reason;
}

// The update box only constrains runs that leave the prescribed state, so
// a different update there is accepted, just as the checker finds it
// vacuous.
TEST(Asserted, DifferentUpdateAgreesWithSatisfaction) {
  SessionEnv delta{{{"s", "p"}, parse_assertion(kCounter)}};
  auto lazy = parse_process("s[p,q]!{ true :: l<@x>(y)<skip>. 0 }");
  auto pre = parse_expr("@x > 10");
  EXPECT_TRUE(prove_asserted(pre, {}, delta, lazy, counter_domain()).ok);
  for (std::int64_t x = 0; x < 32; ++x) {
    EXPECT_TRUE(check_judgement(pre, {}, delta, lazy, {{"x", Value{x}}}).holds());
  }
}

TEST(Asserted, BranchingAssumesThePredicate) {
  SessionEnv delta{{{"s", "p"}, parse_assertion("q?{ l(y:Nat){y > 3}<@x := y>. q!{ m(z:Nat){z > 3}<skip>. end } }")}};
  auto echo = parse_process("s[q,p]?{ l(y:Nat)<@x := y>. s[p,q]!{ true :: m<@x>(z)<skip>. 0 } }");
  auto r = prove_asserted(Expr::boolean(true), {}, delta, echo, {{"x", Domain::range(-4, 11)}});
  EXPECT_TRUE(r.ok) << r.reason;
}

TEST(Asserted, Recursion) {
  SessionEnv delta{{{"s", "p"}, parse_assertion("mu t{w: w == 0}(i:Nat). q!{ l(z:Nat){z >= 1}<skip>. t(w: w == i) } : i >= 0")}};
  auto loop = parse_process("mu X(i := 0). s[p,q]!{ true :: l<1>(y)<skip>. X<i> }");
  auto r = prove_asserted(Expr::boolean(true), {}, delta, loop, {}, ProveOptions{8});
  EXPECT_TRUE(r.ok) << r.reason;
  auto off = parse_process("mu X(i := 0). s[p,q]!{ true :: l<0>(y)<skip>. X<i> }");
  EXPECT_FALSE(prove_asserted(Expr::boolean(true), {}, delta, off, {}, ProveOptions{8}).ok);
}
