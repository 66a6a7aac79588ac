// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
// fails. Bounds and time limits are fixed here.

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "generators.hpp"
#include "mpsa/mpsa.hpp"

using namespace mpsa;

namespace {

constexpr int kSortBound = 8;
constexpr int kMuDepth = 6;
constexpr int kStateLo = -2;
constexpr int kStateHi = 5;

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int n, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool in_time = secs < limit_s;
  bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::printf("%s [%d] %s (%.2fs, limit %.0fs)%s%s\n", pass ? "PASS" : "FAIL", n, name.c_str(), secs, limit_s,
              o.detail.empty() ? "" : ": ", o.detail.c_str());
  if (!in_time) std::printf("     over the time limit\n");
  std::fflush(stdout);
}

SatOptions sat_opts() {
  SatOptions o;
  o.sort_bound = kSortBound;
  o.mu_depth = kMuDepth;
  return o;
}

LtsOptions lts_opts() {
  LtsOptions o;
  o.sort_bound = kSortBound;
  return o;
}

ProveOptions prove_opts() {
  ProveOptions o;
  o.sort_bound = kSortBound;
  return o;
}

std::map<std::string, Domain> domains(const std::vector<std::string>& vars) {
  std::map<std::string, Domain> d;
  for (const auto& v : vars) d[v] = Domain::range(kStateLo, kStateHi);
  return d;
}

using Path = std::vector<std::string>;

std::set<Path> paths(const Formula& f) {
  std::set<Path> out;
  for (const auto& c : chains(f)) {
    Path p;
    for (const auto& a : modality_path(c)) p.push_back(print_action(a));
    out.insert(p);
  }
  return out;
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

Path labels(const std::string& prefix, int n) {
  Path p;
  for (int i = 1; i <= n; ++i) p.push_back(prefix + std::to_string(i));
  return p;
}

std::string counted(int got, int want, const std::string& what) {
  return std::to_string(got) + "/" + std::to_string(want) + " " + what;
}

// ---------------------------------------------------------------------------

Outcome embed_counter() {
  auto f = embed(parse_assertion("C!{ l(y:Nat){y > 10 /\\ y == @x}<@x++>. end }"), "s", "S");
  auto want = fml::forall(
      "y", Sort::Nat,
      fml::must(act::output("s", "S", "C", Expr::var("y")),
                fml::conj(fml::pred(gt(Expr::var("y"), Expr::integer(10)) && eq(Expr::var("y"), Expr::state("x"))),
                          fml::must(act::update(Update::increment("x")), fml::tt()))));
  return {f == want, print_formula(f)};
}

Outcome shuffle_counts() {
  auto six = paths(shuffle(parse_formula("[1][2]true"), parse_formula("[A][B]true")));
  std::set<Path> want6 = {{"1", "2", "A", "B"}, {"A", "B", "1", "2"}, {"1", "A", "2", "B"},
                          {"A", "1", "B", "2"}, {"1", "A", "B", "2"}, {"A", "1", "2", "B"}};
  if (six != want6) return {false, "2x2 shuffle has " + std::to_string(six.size()) + " paths"};
  for (int m = 0; m <= 5; ++m) {
    for (int n = 0; n <= 5; ++n) {
      std::set<Path> want;
      Path cur;
      interleave(labels("a", m), 0, labels("b", n), 0, cur, want);
      if (paths(shuffle(gen::label_chain("a", m), gen::label_chain("b", n))) != want) {
        return {false, "mismatch at m=" + std::to_string(m) + ", n=" + std::to_string(n)};
      }
    }
  }
  return {true, "6 interleavings; all m,n <= 5 match"};
}

Outcome recursion_pipeline() {
  const char* displayed =
      "mu A. ([1] (mu B. ([2] A /\\ [3] mu C. ([4] B /\\ [2] ([1] C /\\ [4] A)))) /\\ "
      "[3] (mu D. ([4] A /\\ [1] mu E. ([2] D /\\ [4] ([2] A /\\ [3] E)))))";
  auto r = rec_interleave(std::vector<Formula>{parse_formula("mu X. [1][2] X"), parse_formula("mu Y. [3][4] Y")});
  std::ostringstream os;
  os << r.component_states[0] << "," << r.component_states[1] << " -> " << r.product_states << " -> "
     << r.expanded_states;
  bool counts = r.component_states == std::vector<int>{2, 2} && r.product_states == 4 && r.expanded_states == 7;
  bool same = bisimilar(formula_to_automaton(r.formula), formula_to_automaton(parse_formula(displayed)));
  return {counts && same, os.str() + (same ? ", bisimilar to the displayed formula" : ", NOT bisimilar")};
}

Outcome soundness() {
  gen::Rng r(4004);
  gen::Endpoint e;
  e.vars = {"x", "z"};
  e.recursive = 0.3;
  auto states = gen::all_states(e.vars, kStateLo, kStateHi);
  int accepted = 0, attempts = 0;
  while (accepted < 200 && attempts < 5000) {
    ++attempts;
    auto in = gen::instance(r, e);
    auto pre = parse_expr(gen::precondition_src(r, e.vars), {}, gen::int_state(e.vars));
    SessionEnv delta{{{"s", "p"}, in.assertion}};
    if (!prove_asserted(pre, {}, delta, in.process, domains(e.vars), prove_opts()).ok) continue;
    ++accepted;
    for (const auto& s : states) {
      auto v = check_judgement(pre, {}, delta, in.process, s, sat_opts());
      if (!v.holds()) {
        return {false, "counterexample " + in.process_src + " against " + in.assertion_src + " at {" +
                           print_state(s) + "}: " + to_string(v.kind) + " " + v.reason};
      }
    }
  }
  return {accepted >= 200, counted(accepted, 200, "accepted instances hold in every state") + " (" +
                               std::to_string(attempts) + " generated)"};
}

Outcome completeness() {
  gen::Rng r(5005);
  gen::Endpoint e;
  e.vars = {"x", "z"};
  auto states = gen::all_states(e.vars, kStateLo, kStateHi);
  int qualifying = 0, attempts = 0;
  while (qualifying < 200 && attempts < 5000) {
    ++attempts;
    auto in = gen::instance(r, e);
    auto pre = parse_expr(gen::precondition_src(r, e.vars), {}, gen::int_state(e.vars));
    SessionEnv delta{{{"s", "p"}, in.assertion}};
    if (!typecheck_unasserted(in.process, erase_env(delta)).ok) continue;
    bool all = true;
    for (const auto& s : states) {
      if (!check_judgement(pre, {}, delta, in.process, s, sat_opts()).holds()) {
        all = false;
        break;
      }
    }
    if (!all) continue;
    ++qualifying;
    auto proof = prove_asserted(pre, {}, delta, in.process, domains(e.vars), prove_opts());
    if (!proof.ok) {
      return {false, "rejected " + in.process_src + " against " + in.assertion_src + ": " + proof.reason};
    }
  }
  return {qualifying >= 200, counted(qualifying, 200, "satisfying instances proved") + " (" +
                                 std::to_string(attempts) + " generated)"};
}

Outcome shuffling_correctness() {
  SessionEnv delta{{{"s", "p2"}, parse_assertion("p1?{ l(x:Nat){true}<skip>. end }")},
                   {{"k", "q1"}, parse_assertion("q2!{ m(y:Nat){y == 10}<skip>. end }")}};
  SatOptions wide;
  wide.sort_bound = 16;
  auto f = env_formula(delta, {});
  for (const char* src : {"s[p1,p2]?{ l(x:Nat)<skip>. k[q1,q2]!{ true :: m<10>(y)<skip>. 0 } }",
                          "k[q1,q2]!{ true :: m<10>(y)<skip>. s[p1,p2]?{ l(x:Nat)<skip>. 0 } }"}) {
    if (!sat(Config{parse_process(src), {}}, f, wide).holds()) return {false, std::string("two-order example: ") + src};
  }

  gen::Rng r(6006);
  gen::Endpoint a, b;
  a.vars = {"x"};
  b.session = "k";
  b.label_prefix = "m";
  b.vars = {"z"};
  int pairs = 0;
  for (int i = 0; i < 2000 && pairs < 100; ++i) {
    auto x = gen::instance(r, a), y = gen::instance(r, b);
    auto fx = embed(x.assertion, "s", "p"), fy = embed(y.assertion, "k", "p");
    auto s = gen::random_state(r, {"x", "z"}, kStateLo, kStateHi);
    if (!sat(Config{x.process, s}, fx, sat_opts()).holds() || !sat(Config{y.process, s}, fy, sat_opts()).holds()) continue;
    ++pairs;
    auto v = sat(Config{proc::par(x.process, y.process), s}, shuffle(fx, fy), sat_opts());
    if (!v.holds()) return {false, x.process_src + " | " + y.process_src + ": " + v.reason};
  }
  return {pairs >= 100, "both orders hold; " + counted(pairs, 100, "disjoint pairs")};
}

Outcome stability_lemma() {
  gen::Rng r(7007);
  gen::Endpoint e;
  e.vars = {"x"};
  e.recursive = 0.3;
  std::ostringstream detail;
  bool ok = true;

  // Actions stay inside the environment.
  int acting = 0;
  for (int i = 0; i < 1000 && acting < 100; ++i) {
    auto in = gen::instance(r, e);
    SessionEnv delta;
    SharedEnv gamma;
    Process p = in.process;
    if (r.coin()) {
      gamma["a"] = {{"p", in.assertion}};
      p = proc::accept("a", "p", "s", in.process);
    } else {
      delta[{"s", "p"}] = in.assertion;
    }
    if (!typecheck_unasserted(p, erase_env(delta), gamma).ok) continue;
    ++acting;
    std::vector<std::pair<Config, std::set<std::string>>> frontier{{Config{p, gen::random_state(r, e.vars, kStateLo, kStateHi)}, {}}};
    for (int d = 0; d < 6 && !frontier.empty(); ++d) {
      decltype(frontier) next;
      for (const auto& [c, opened] : frontier) {
        for (auto& t : step(c, lts_opts())) {
          auto seen = opened;
          if (auto* m = std::get_if<CommAction>(&t.action.v)) {
            std::string actor = m->dir == Direction::Out ? m->from : m->to;
            if (!delta.count({m->session, actor}) && !seen.count(m->session)) {
              ok = false;
              detail << "(i) " << print_action(t.action) << " outside the environment; ";
            }
          } else if (auto* acc = std::get_if<AcceptAction>(&t.action.v)) {
            if (!gamma.count(acc->shared)) {
              ok = false;
              detail << "(i) unknown shared name " << acc->shared << "; ";
            }
            seen.insert(acc->session);
          }
          if (next.size() < 64) next.push_back({t.target, seen});
        }
      }
      frontier = std::move(next);
    }
  }

  // Inert parallel components change nothing.
  std::vector<Process> inert{proc::inact(), proc::par(proc::inact(), proc::inact()),
                             proc::par(proc::par(proc::inact(), proc::inact()), proc::inact())};
  int idle = 0;
  for (int i = 0; i < 1000 && idle < 100; ++i) {
    auto in = gen::instance(r, e);
    auto f = embed(in.assertion, "s", "p");
    auto s = gen::random_state(r, e.vars, kStateLo, kStateHi);
    if (!sat(Config{in.process, s}, f, sat_opts()).holds()) continue;
    ++idle;
    if (!sat(Config{proc::par(in.process, r.pick(inert)), s}, f, sat_opts()).holds()) {
      ok = false;
      detail << "(ii) " << in.process_src << "; ";
    }
  }

  // Predicates survive communication.
  int stable = 0;
  for (int i = 0; i < 2000 && stable < 100; ++i) {
    auto in = gen::instance(r, e);
    auto a = fml::pred(parse_expr(gen::precondition_src(r, e.vars), {}, gen::int_state(e.vars)));
    auto s = gen::random_state(r, e.vars, kStateLo, kStateHi);
    if (!sat(Config{in.process, s}, a, sat_opts()).holds()) continue;
    for (const auto& t : step(Config{in.process, s}, lts_opts())) {
      if (!std::holds_alternative<CommAction>(t.action.v)) continue;
      ++stable;
      if (!sat(Config{t.target.process, s}, a, sat_opts()).holds()) {
        ok = false;
        detail << "(iii) " << in.process_src << "; ";
      }
    }
  }

  // Substitution agrees with writing the value and with binding it.
  int substituted = 0;
  for (int i = 0; i < 100; ++i) {
    auto in = gen::instance(r, e);
    auto inner = embed(in.assertion, "s", "p");
    bool exact = r.coin();
    auto open_formula = [&](const Expr& u) {
      Expr guard = exact ? eq(Expr::var("z0"), u) : gt(Expr::var("z0"), u);
      return fml::forall("z0", Sort::Nat,
                         fml::must(act::output("s", "p", "q", Expr::var("z0")),
                                   fml::conj(fml::pred(guard), fml::must(act::update(Update::skip()), inner))));
    };
    auto open_process = [&](const Expr& u) {
      return proc::select("s", "p", "q", {GuardedBranch{Expr::boolean(true), "m0", u, "z0", Update::skip(), in.process}});
    };
    auto p = open_process(Expr::var("u"));
    auto f = open_formula(Expr::var("u"));
    auto s = gen::random_state(r, e.vars, kStateLo, kStateHi);
    std::int64_t v = r.between(0, 5);
    ExprSubst to_v{{"u", Expr::integer(v)}};
    auto by_subst = sat(Config{subst_process(p, to_v), s}, subst_formula(f, to_v), sat_opts());
    auto by_text = sat(Config{open_process(Expr::integer(v)), s}, open_formula(Expr::integer(v)), sat_opts());
    auto by_binding = sat(Config{subst_process(p, to_v), s},
                          fml::forall("u", Sort::Nat, fml::implies(fml::pred(eq(Expr::var("u"), Expr::integer(v))), f)),
                          sat_opts());
    NameMap ren{{"s", "k"}};
    auto renamed = sat(Config{rename_names(subst_process(p, to_v), ren), s}, rename_names(subst_formula(f, to_v), ren),
                       sat_opts());
    ++substituted;
    if (by_subst.kind != by_text.kind || by_subst.kind != by_binding.kind || by_subst.kind != renamed.kind) {
      ok = false;
      detail << "(iv) " << in.process_src << "; ";
    }
  }

  detail << "(i) " << acting << ", (ii) " << idle << ", (iii) " << stable << ", (iv) " << substituted << " instances";
  bool enough = acting >= 100 && idle >= 100 && stable >= 100 && substituted >= 100;
  return {ok && enough, detail.str()};
}

Outcome pure_round_trip() {
  std::string n1 = print_pi(encode_store({{"x", Value{std::int64_t{5}}}}));
  // The n = 1 display with a_1, x_1, y_1, v_1 instantiated to a_x, x, y, 5.
  const std::string displayed = "~a_x<5> | !x(e).a_x(y).~a_x<eval(e[y/x])>";
  if (n1 != displayed) return {false, "store encoding printed as " + n1};

  gen::Rng r(8008);
  PiOptions o;
  o.sort_bound = kSortBound;
  o.mu_depth = kMuDepth;
  o.repl_depth = 4;
  int agreed = 0, decided = 0;
  for (int i = 0; i < 100; ++i) {
    gen::Endpoint e;
    e.vars = r.coin() ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "z"};
    e.max_comms = 3;
    e.recursive = 0.2;
    auto in = gen::instance(r, e);
    auto rt = round_trip(in.process, gen::random_state(r, e.vars, kStateLo, kStateHi), embed(in.assertion, "s", "p"), o);
    if (!rt.agree()) {
      return {false, in.process_src + " against " + in.assertion_src + ": direct " + to_string(rt.direct.kind) +
                         ", encoded " + to_string(rt.encoded.kind)};
    }
    ++agreed;
    decided += !rt.direct.inconclusive() && !rt.encoded.inconclusive();
  }
  return {agreed >= 100, "n=1 store matches; " + counted(agreed, 100, "instances agree") + " (" +
                             std::to_string(decided) + " decided both ways)"};
}

Outcome automata_equivalence() {
  gen::Rng r(9009);
  int done = 0, retried = 0, retranslated = 0;
  while (done < 100) {
    auto a = gen::random_automaton(r, 20, "abcd");
    PacketAutomaton e;
    try {
      e = expand_to_branch(a);
    } catch (const Error& err) {
      if (err.code() != "automata.budget") throw;
      ++retried;
      continue;
    }
    ++done;
    if (!bisimilar(e, a)) return {false, "expansion not bisimilar:\n" + to_dot(a)};
    for (const auto* b : {&a, &e}) {
      if (!is_branch_form(*b)) continue;
      ++retranslated;
      if (!bisimilar(formula_to_automaton(automaton_to_formula(*b)), *b)) {
        return {false, "re-translation not bisimilar:\n" + to_dot(*b)};
      }
    }
  }
  return {true, std::to_string(done) + " automata (" + std::to_string(retried) + " over budget, redrawn), " +
                    std::to_string(retranslated) + " branch-form re-translations"};
}

}  // namespace

int main() {
  criterion(1, "counter assertion embeds to the expected formula", 1, embed_counter);
  criterion(2, "shuffle yields every interleaving", 5, shuffle_counts);
  criterion(3, "recursion pipeline on two loops", 1, recursion_pipeline);
  criterion(4, "proved judgements hold (soundness)", 60, soundness);
  criterion(5, "satisfied judgements are proved (completeness)", 120, completeness);
  criterion(6, "shuffling correctness", 60, shuffling_correctness);
  criterion(7, "stability lemma (i)-(iv)", 60, stability_lemma);
  criterion(8, "pure encoding round trip", 60, pure_round_trip);
  criterion(9, "automata expansion and re-translation", 60, automata_equivalence);
  std::printf("%s\n", failures == 0 ? "all criteria passed" : (std::to_string(failures) + " criteria failed").c_str());
  return failures == 0 ? 0 : 1;
}
