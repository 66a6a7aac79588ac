#pragma once

#include <set>
#include <string>
#include <vector>

#include "mpsa/kernel/names.hpp"
#include "mpsa/kernel/print.hpp"
#include "mpsa/predicates.hpp"

namespace mpsa {

struct Config {
  Process process;
  VirtualState state;
  bool operator==(const Config&) const = default;
};

struct Transition {
  Action action;
  Config target;
};

struct LtsOptions {
  int sort_bound = kDefaultSortBound;
  int max_unfold = 64;  // nested silent unfoldings before declaring the recursion unguarded
};

inline std::string print_config(const Config& c) { return print_process(c.process) + " , {" + print_state(c.state) + "}"; }

namespace detail {

inline Process unfold(const PRecDef& d, const VirtualState& s) {
  Value v = eval(d.init, Binding{{}, s});
  Process body = subst_process(d.body, {{d.param, Expr::lit(v)}});
  return replace_calls(body, d.name, [&](const Expr& arg) { return proc::rec(d.name, d.param, arg, d.body); });
}

inline std::string fresh_session(std::set<std::string>& avoid) {
  for (int i = 1;; ++i) {
    std::string s = "_s" + std::to_string(i);
    if (avoid.insert(s).second) return s;
  }
}

inline void step_into(const Process& p, const VirtualState& s, const LtsOptions& opts, std::set<std::string>& avoid,
                      int unfolds, const std::function<void(Action, Process, VirtualState)>& emit) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PInact>) {
          return;
        } else if constexpr (std::is_same_v<T, PSelect>) {
          const GuardedBranch* chosen = nullptr;
          for (const auto& b : n.branches) {
            if (!holds(b.guard, s)) continue;
            if (chosen) {
              throw Error("lts.guards", "guards `" + print_expr(chosen->guard) + "` and `" + print_expr(b.guard) +
                                            "` both hold at {" + print_state(s) + "}");
            }
            chosen = &b;
          }
          if (!chosen) throw Error("lts.guards", "no guard holds at {" + print_state(s) + "}");
          Value v = eval(chosen->payload, Binding{{}, s});
          ExprSubst sub{{chosen->var, Expr::lit(v)}};
          emit(act::output(n.session, n.from, n.to, Expr::lit(v), chosen->label),
               proc::pending(subst_vars(chosen->update, sub), subst_process(chosen->cont, sub)), s);
        } else if constexpr (std::is_same_v<T, PBranch>) {
          for (const auto& b : n.branches) {
            for (const Value& v : domain_of(b.sort.value_or(Sort::Int), opts.sort_bound).values()) {
              ExprSubst sub{{b.var, Expr::lit(v)}};
              emit(act::input(n.session, n.from, n.to, Expr::lit(v), b.label),
                   proc::pending(subst_vars(b.update, sub), subst_process(b.cont, sub)), s);
            }
          }
        } else if constexpr (std::is_same_v<T, PPending>) {
          Update resolved;
          for (const auto& a : n.update.assignments) {
            resolved.assignments.push_back({a.var, Expr::lit(eval(a.rhs, Binding{{}, s}))});
          }
          emit(act::update(resolved), n.cont, apply_update(n.update, s));
        } else if constexpr (std::is_same_v<T, PPar>) {
          step_into(n.left, s, opts, avoid, unfolds, [&](Action a, Process l, VirtualState t) {
            emit(std::move(a), proc::par(std::move(l), n.right), std::move(t));
          });
          step_into(n.right, s, opts, avoid, unfolds, [&](Action a, Process r, VirtualState t) {
            emit(std::move(a), proc::par(n.left, std::move(r)), std::move(t));
          });
        } else if constexpr (std::is_same_v<T, PRecDef>) {
          if (unfolds >= opts.max_unfold) throw Error("lts.unguarded", "recursion `" + n.name + "` is unguarded");
          step_into(unfold(n, s), s, opts, avoid, unfolds + 1, emit);
        } else if constexpr (std::is_same_v<T, PRecCall>) {
          throw Error("lts.unbound", "call to unbound process variable `" + n.name + "`");
        } else {
          // Request and accept both join a session under a fresh name.
          std::string session = fresh_session(avoid);
          emit(act::accept(n.shared, session, n.role), rename_names(n.body, {{n.var, session}}), s);
        }
      },
      p.node().v);
}

}  // namespace detail

/// All one-step successors of `c`. Recursion unfolds silently.
inline std::vector<Transition> step(const Config& c, const LtsOptions& opts = {}) {
  std::vector<Transition> out;
  auto avoid = free_names(c.process);
  detail::step_into(c.process, c.state, opts, avoid, 0, [&](Action a, Process p, VirtualState s) {
    out.push_back(Transition{std::move(a), Config{std::move(p), std::move(s)}});
  });
  return out;
}

using Trace = std::vector<Action>;

/// Every maximal action sequence of length at most `depth`.
inline std::vector<Trace> traces(const Config& c, int depth, const LtsOptions& opts = {}) {
  std::vector<Trace> out;
  Trace cur;
  std::function<void(const Config&, int)> go = [&](const Config& k, int d) {
    auto ts = d > 0 ? step(k, opts) : std::vector<Transition>{};
    if (ts.empty()) {
      out.push_back(cur);
      return;
    }
    for (const auto& t : ts) {
      cur.push_back(t.action);
      go(t.target, d - 1);
      cur.pop_back();
    }
  };
  go(c, depth);
  return out;
}

inline std::string print_trace(const Trace& t) {
  std::string out;
  for (const auto& a : t) out += print_trace_action(a) + "\n";
  return out;
}

}  // namespace mpsa
