#include <gtest/gtest.h>

#include "generators.hpp"
#include "mpsa/mpsa.hpp"

using namespace mpsa;

namespace {

Value I(std::int64_t v) { return Value{v}; }

const char* kCounter = "forall y:Nat. [s[p,q]!(y)] ((y > 10 /\\ y == @x) /\\ [<@x++>] true)";

}  // namespace

TEST(Store, SingleCell) {
  EXPECT_EQ(print_pi(encode_store({{"x", I(5)}})), "~a_x<5> | !x(e).a_x(y).~a_x<eval(e[y/x])>");
  EXPECT_EQ(print_pi(encode_store({})), "0");
}

TEST(Store, TwoCellsCaptureInAscendingOrder) {
  auto s = print_pi(encode_store({{"z", I(2)}, {"x", I(1)}}));
  EXPECT_EQ(s,
            "~a_x<1> | ~a_z<2> | !x(e).a_x(y1).a_z(y2).(~a_x<eval(e[y1,y2/x,z])> | ~a_z<y2>) | "
            "!z(e).a_x(y1).a_z(y2).(~a_x<y1> | ~a_z<eval(e[y1,y2/x,z])>)");
  EXPECT_TRUE(store_linear(encode_store({{"z", I(2)}, {"x", I(1)}}), {"x", "z"}));
  EXPECT_EQ(pi_store(encode_store({{"z", I(2)}, {"x", I(1)}})), (VirtualState{{"x", I(1)}, {"z", I(2)}}));
}

TEST(EncodeFormula, UpdatesAndReads) {
  EXPECT_EQ(encode_formula(fml::tt(), {}), fml::tt());
  EXPECT_EQ(print_formula(encode_formula(parse_formula("[<@x++>] true"), {"x"})), "[~x<@x + 1>] true");
  EXPECT_EQ(print_formula(encode_formula(parse_formula(kCounter), {"x"})),
            "forall y:Nat. [s[p,q]!(y)] ([~a_x<v>] (y > 10 /\\ y == v) /\\ [~x<@x + 1>] true)");
  EXPECT_EQ(print_formula(encode_formula(parse_formula("[<skip>] true"), {})), "[~skip<0>] true");
  try {
    encode_formula(parse_formula("[<@x++>] true"), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "pure_hml.store");
  }
}

TEST(EncodeProcess, ReadsThroughTheCell) {
  EXPECT_TRUE(is_nil(encode_process(proc::inact())));
  auto p = parse_process("s[p,q]!{ true :: l<@x>(y)<@x++>. 0 }");
  EXPECT_EQ(print_pi(encode_process(p)), "a_x(c).(~a_x<c> | s[p,q]!{ true :: l<c>. ~x<@x + 1> })");
  try {
    encode_process(parse_process("s[p,q]!{ true :: l<1>(y)<@x := 1, @z := @x>. 0 }"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "pure_hml.update");
  }
}

TEST(PiSat, Basics) {
  EXPECT_TRUE(pi_sat(pi::nil(), fml::tt()).holds());
  auto f = encode_formula(parse_formula("@x == 5"), {"x"});
  EXPECT_TRUE(pi_sat(encode_store({{"x", I(5)}}), f).holds());
  EXPECT_TRUE(pi_sat(encode_store({{"x", I(4)}}), f).fails());
}

TEST(RoundTrip, CounterSender) {
  auto p = parse_process("s[p,q]!{ true :: l<@x>(y)<@x++>. 0 }");
  auto f = parse_formula(kCounter);
  for (std::int64_t x : {3, 10, 11, 20}) {
    auto rt = round_trip(p, {{"x", I(x)}}, f);
    EXPECT_FALSE(rt.direct.inconclusive());
    EXPECT_EQ(rt.direct.kind, rt.encoded.kind) << "x = " << x;
    EXPECT_EQ(rt.direct.holds(), x > 10);
  }
}

TEST(PureProperties, StoreStaysLinearAlongRuns) {
  gen::Rng r(808);
  gen::Endpoint e;
  e.vars = {"x", "z"};
  for (int i = 0; i < 40; ++i) {
    auto in = gen::instance(r, e);
    auto state = gen::random_state(r, e.vars, -2, 5);
    PiOptions o;
    o.sort_bound = 8;
    std::vector<PiConfig> frontier{PiConfig{pi::par(encode_store(state), encode_process(in.process)), 0}};
    for (int depth = 0; depth < 8 && !frontier.empty(); ++depth) {
      std::vector<PiConfig> next;
      for (const auto& c : frontier) {
        ASSERT_TRUE(store_linear(c.process, {"x", "z"})) << print_pi(c.process);
        for (auto& t : pi_step(c, o)) {
          if (!t.cut && next.size() < 64) next.push_back(t.target);
        }
      }
      frontier = std::move(next);
    }
  }
}
