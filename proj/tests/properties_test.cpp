#include <gtest/gtest.h>

#include <set>

#include "generators.hpp"
#include "mpsa/mpsa.hpp"

using namespace mpsa;

namespace {

SatOptions bounded() {
  SatOptions o;
  o.sort_bound = 8;
  o.mu_depth = 6;
  return o;
}

LtsOptions lts_bounded() {
  LtsOptions o;
  o.sort_bound = 8;
  return o;
}

// Configurations reachable in at most `depth` steps, at most `cap` per level.
template <class F>
void explore(const Config& start, int depth, F&& on_step, std::size_t cap = 64) {
  std::vector<Config> frontier{start};
  for (int d = 0; d < depth && !frontier.empty(); ++d) {
    std::vector<Config> next;
    for (const auto& c : frontier) {
      for (auto& t : step(c, lts_bounded())) {
        on_step(c, t);
        if (next.size() < cap) next.push_back(t.target);
      }
    }
    frontier = std::move(next);
  }
}

gen::Endpoint s_side() {
  gen::Endpoint e;
  e.vars = {"x"};
  return e;
}

gen::Endpoint k_side() {
  gen::Endpoint e;
  e.session = "k";
  e.label_prefix = "m";
  e.vars = {"z"};
  return e;
}

ParseOptions both_vars() { return gen::int_state({"x", "z"}); }

}  // namespace

// A typed process only acts on the sessions and shared names of its
// environment.
TEST(StabilityLemma, NoActionOutsideTheEnvironment) {
  gen::Rng r(1001);
  auto e = s_side();
  e.recursive = 0.3;
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    auto in = gen::instance(r, e);
    bool shared = r.coin();
    SessionEnv delta;
    SharedEnv gamma;
    Process p = in.process;
    if (shared) {
      gamma["a"] = {{"p", in.assertion}};
      p = proc::accept("a", "p", "s", in.process);
    } else {
      delta[{"s", "p"}] = in.assertion;
    }
    if (!typecheck_unasserted(p, erase_env(delta), gamma).ok) continue;
    ++checked;
    std::set<std::string> opened;
    explore(Config{p, gen::random_state(r, e.vars, -2, 5)}, 6, [&](const Config&, const Transition& t) {
      if (auto* c = std::get_if<CommAction>(&t.action.v)) {
        std::string actor = c->dir == Direction::Out ? c->from : c->to;
        bool known = delta.count({c->session, actor}) || opened.count(c->session);
        EXPECT_TRUE(known) << print_action(t.action) << " from " << in.process_src;
      } else if (auto* a = std::get_if<AcceptAction>(&t.action.v)) {
        EXPECT_TRUE(gamma.count(a->shared)) << print_action(t.action);
        opened.insert(a->session);
      }
    });
  }
  EXPECT_GE(checked, 100);
}

TEST(StabilityLemma, InertParallelKeepsSatisfaction) {
  gen::Rng r(1002);
  auto e = s_side();
  e.recursive = 0.3;
  std::vector<Process> inert{proc::inact(), proc::par(proc::inact(), proc::inact()),
                             proc::par(proc::par(proc::inact(), proc::inact()), proc::inact())};
  int checked = 0;
  for (int i = 0; i < 300 && checked < 100; ++i) {
    auto in = gen::instance(r, e);
    auto f = embed(in.assertion, "s", "p");
    auto state = gen::random_state(r, e.vars, -2, 5);
    if (!sat(Config{in.process, state}, f, bounded()).holds()) continue;
    ++checked;
    const auto& idle = r.pick(inert);
    EXPECT_TRUE(step(Config{idle, state}).empty());
    EXPECT_TRUE(sat(Config{proc::par(in.process, idle), state}, f, bounded()).holds()) << in.process_src;
  }
  EXPECT_GE(checked, 100);
}

// Communications leave the state alone, so a predicate that holds before a
// communication holds after it.
TEST(StabilityLemma, PredicatesSurviveCommunication) {
  gen::Rng r(1003);
  auto e = s_side();
  int checked = 0;
  for (int i = 0; i < 400 && checked < 100; ++i) {
    auto in = gen::instance(r, e);
    auto a = fml::pred(parse_expr(gen::precondition_src(r, e.vars), {}, gen::int_state(e.vars)));
    auto state = gen::random_state(r, e.vars, -2, 5);
    if (!sat(Config{in.process, state}, a, bounded()).holds()) continue;
    for (const auto& t : step(Config{in.process, state}, lts_bounded())) {
      if (!std::holds_alternative<CommAction>(t.action.v)) continue;
      ++checked;
      EXPECT_TRUE(sat(Config{t.target.process, state}, a, bounded()).holds());
    }
  }
  EXPECT_GE(checked, 100);
}

// Substituting a value for a free variable agrees with writing the value in
// directly and with binding it in the formula; renaming a session
// consistently changes nothing.
TEST(StabilityLemma, SubstitutionAndRenaming) {
  gen::Rng r(1004);
  auto e = s_side();
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    auto in = gen::instance(r, e);
    auto inner = embed(in.assertion, "s", "p");
    bool exact = r.coin();
    auto guard = [&](const Expr& u) {
      return exact ? eq(Expr::var("z0"), u) : gt(Expr::var("z0"), u);
    };
    auto open_formula = [&](const Expr& u) {
      return fml::forall("z0", Sort::Nat,
                         fml::must(act::output("s", "p", "q", Expr::var("z0")),
                                   fml::conj(fml::pred(guard(u)), fml::must(act::update(Update::skip()), inner))));
    };
    auto open_process = [&](const Expr& u) {
      return proc::select("s", "p", "q", {GuardedBranch{Expr::boolean(true), "m0", u, "z0", Update::skip(), in.process}});
    };
    Process p = open_process(Expr::var("u"));
    Formula f = open_formula(Expr::var("u"));
    auto state = gen::random_state(r, e.vars, -2, 5);
    for (std::int64_t v = 0; v <= 5; ++v) {
      ExprSubst to_v{{"u", Expr::integer(v)}};
      auto substituted = sat(Config{subst_process(p, to_v), state}, subst_formula(f, to_v), bounded());
      auto written = sat(Config{open_process(Expr::integer(v)), state}, open_formula(Expr::integer(v)), bounded());
      auto bound = sat(Config{subst_process(p, to_v), state},
                       fml::forall("u", Sort::Nat, fml::implies(fml::pred(eq(Expr::var("u"), Expr::integer(v))), f)),
                       bounded());
      EXPECT_EQ(substituted.kind, written.kind) << in.process_src;
      EXPECT_EQ(substituted.kind, bound.kind) << in.process_src;
      ++checked;
    }
    NameMap ren{{"s", "k"}};
    auto closed = subst_process(p, {{"u", Expr::integer(1)}});
    auto closed_f = subst_formula(f, {{"u", Expr::integer(1)}});
    EXPECT_EQ(sat(Config{closed, state}, closed_f, bounded()).kind,
              sat(Config{rename_names(closed, ren), state}, rename_names(closed_f, ren), bounded()).kind);
  }
  EXPECT_GE(checked, 100);
}

TEST(ShufflingCorrectness, DisjointPairs) {
  gen::Rng r(1005);
  auto a = s_side(), b = k_side();
  int checked = 0;
  for (int i = 0; i < 400 && checked < 100; ++i) {
    auto x = gen::instance(r, a), y = gen::instance(r, b);
    auto fx = embed(x.assertion, "s", "p"), fy = embed(y.assertion, "k", "p");
    auto state = gen::random_state(r, {"x", "z"}, -2, 5);
    if (!sat(Config{x.process, state}, fx, bounded()).holds()) continue;
    if (!sat(Config{y.process, state}, fy, bounded()).holds()) continue;
    ++checked;
    auto v = sat(Config{proc::par(x.process, y.process), state}, shuffle(fx, fy), bounded());
    EXPECT_TRUE(v.holds()) << x.process_src << " | " << y.process_src << ": " << v.reason;
  }
  EXPECT_GE(checked, 100);
}

// Typed two-session compositions: the prover accepts exactly when the
// environment formula holds in every state.
TEST(Preciseness, TwoSessionCompositions) {
  gen::Rng r(1006);
  auto a = s_side(), b = k_side();
  a.max_comms = b.max_comms = 2;
  std::map<std::string, Domain> domains{{"x", Domain::range(-2, 5)}, {"z", Domain::range(-2, 5)}};
  auto states = gen::all_states({"x", "z"}, -2, 5);
  int accepted = 0;
  for (int i = 0; i < 30; ++i) {
    auto x = gen::instance(r, a), y = gen::instance(r, b);
    SessionEnv delta{{{"s", "p"}, x.assertion}, {{"k", "p"}, y.assertion}};
    auto p = proc::par(x.process, y.process);
    auto pre = parse_expr(gen::precondition_src(r, {"x", "z"}), {}, both_vars());
    ProveOptions po;
    po.sort_bound = 8;
    bool proved = prove_asserted(pre, {}, delta, p, domains, po).ok;
    bool all = true, decided = true;
    for (const auto& s : states) {
      auto v = check_judgement(pre, {}, delta, p, s, bounded());
      all = all && v.holds();
      decided = decided && !v.inconclusive();
    }
    if (!decided) continue;
    accepted += proved;
    EXPECT_EQ(proved, all) << x.process_src << " | " << y.process_src << " under " << print_expr(pre);
  }
  EXPECT_GT(accepted, 0);
}

namespace {

using Path = std::vector<std::string>;

// Label paths of exactly `n` steps from the initial state.
std::set<Path> label_paths(const PacketAutomaton& a, int n) {
  std::set<std::pair<int, Path>> cur{{0, {}}};
  for (int i = 0; i < n; ++i) {
    std::set<std::pair<int, Path>> next;
    for (const auto& [s, p] : cur) {
      for (const auto& e : a.edges) {
        if (e.from != s) continue;
        Path q = p;
        q.push_back(print_action(e.packet.action));
        next.insert({e.to, q});
      }
    }
    cur = std::move(next);
  }
  std::set<Path> out;
  for (const auto& [s, p] : cur) out.insert(p);
  return out;
}

Path cycle_prefix(const Path& loop, int n) {
  Path p;
  for (int i = 0; i < n; ++i) p.push_back(loop[static_cast<std::size_t>(i) % loop.size()]);
  return p;
}

void interleave(const Path& a, std::size_t i, const Path& b, std::size_t j, Path& cur, std::set<Path>& out) {
  if (i == a.size() && j == b.size()) {
    out.insert(cur);
    return;
  }
  if (i < a.size()) {
    cur.push_back(a[i]);
    interleave(a, i + 1, b, j, cur, out);
    cur.pop_back();
  }
  if (j < b.size()) {
    cur.push_back(b[j]);
    interleave(a, i, b, j + 1, cur, out);
    cur.pop_back();
  }
}

Formula loop_formula(const std::string& name, const Path& labels) {
  Formula f = fml::var(name);
  for (auto it = labels.rbegin(); it != labels.rend(); ++it) f = fml::must(act::label(*it), f);
  return fml::mu(name, f);
}

}  // namespace

TEST(RecInterleave, FiniteTracesAreShuffles) {
  gen::Rng r(1007);
  for (int i = 0; i < 12; ++i) {
    Path la = {"a1"}, lb = {"b1"};
    for (int k = 2, n = r.between(1, 3); k <= n; ++k) la.push_back("a" + std::to_string(k));
    for (int k = 2, n = r.between(1, 3); k <= n; ++k) lb.push_back("b" + std::to_string(k));
    auto rep = rec_interleave(std::vector<Formula>{loop_formula("X", la), loop_formula("Y", lb)});
    auto got = formula_to_automaton(rep.formula);
    for (int d = 0; d <= 8; ++d) {
      std::set<Path> want;
      for (int k = 0; k <= d; ++k) {
        Path cur;
        interleave(cycle_prefix(la, k), 0, cycle_prefix(lb, d - k), 0, cur, want);
      }
      EXPECT_EQ(label_paths(got, d), want) << "depth " << d;
    }
  }
}

TEST(PureRoundTrip, GeneratedInstances) {
  gen::Rng r(1008);
  gen::Endpoint e;
  e.vars = {"x", "z"};
  PiOptions o;
  o.sort_bound = 8;
  o.mu_depth = 6;
  o.repl_depth = 4;
  int decided = 0;
  for (int i = 0; i < 60; ++i) {
    auto in = gen::instance(r, e);
    auto f = embed(in.assertion, "s", "p");
    auto rt = round_trip(in.process, gen::random_state(r, e.vars, -2, 5), f, o);
    EXPECT_TRUE(rt.agree()) << in.process_src << " vs " << in.assertion_src;
    decided += !rt.direct.inconclusive() && !rt.encoded.inconclusive();
  }
  EXPECT_GT(decided, 30);
}
