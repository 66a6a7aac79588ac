#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpsa/kernel/json.hpp"
#include "mpsa/lts.hpp"
#include "mpsa/shuffle.hpp"

namespace mpsa {

struct SatOptions {
  int sort_bound = kDefaultSortBound;
  int mu_depth = 8;
  int max_unfold = 64;
};

enum class VerdictKind { Holds, Fails, Inconclusive };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Holds: return "holds";
    case VerdictKind::Fails: return "fails";
    case VerdictKind::Inconclusive: return "inconclusive";
  }
  return "?";
}

struct Verdict {
  VerdictKind kind = VerdictKind::Holds;
  Trace witness;       // transitions leading to the failing obligation
  std::string reason;  // the failing or unresolved obligation
  std::size_t obligations = 0;

  bool holds() const { return kind == VerdictKind::Holds; }
  bool fails() const { return kind == VerdictKind::Fails; }
  bool inconclusive() const { return kind == VerdictKind::Inconclusive; }
};

inline Json to_json(const Verdict& v) {
  Json j = {{"verdict", to_string(v.kind)}};
  if (!v.holds()) {
    Json w = Json::array();
    for (const auto& a : v.witness) w.push_back(print_trace_action(a));
    j["witness"] = w;
    j["reason"] = v.reason;
  }
  j["obligations_checked"] = v.obligations;
  return j;
}

namespace detail {

/// Variables in scope while checking: message values, and session
/// quantifiers that are bound to an actual session name at first use.
struct SatEnv {
  std::map<std::string, Value> vars;
  std::map<std::string, std::optional<std::string>> sessions;
  std::map<std::string, Formula> mu;
  std::map<std::string, Domain> lazy;  // value quantifiers bound at first match
};

/// Every message variable occurring anywhere in `f`, bound or not.
inline void mentioned_vars(const Formula& f, std::set<std::string>& out) {
  auto add = [&](const Expr& e) {
    for (const auto& v : free_vars(e)) out.insert(v);
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FPred>) {
          add(n.pred);
        } else if constexpr (std::is_same_v<T, FAnd>) {
          mentioned_vars(n.lhs, out);
          mentioned_vars(n.rhs, out);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          mentioned_vars(n.hyp, out);
          mentioned_vars(n.concl, out);
        } else if constexpr (std::is_same_v<T, FForall> || std::is_same_v<T, FMu>) {
          mentioned_vars(n.body, out);
        } else if constexpr (std::is_same_v<T, FMust>) {
          if (auto* c = std::get_if<CommAction>(&n.action.v)) add(c->value);
          if (auto* o = std::get_if<ChanOutAction>(&n.action.v)) add(o->value);
          if (auto* u = std::get_if<UpdateAction>(&n.action.v))
            for (const auto& a : u->update.assignments) add(a.rhs);
          mentioned_vars(n.body, out);
        }
      },
      f.node().v);
}

/// True when every occurrence of `x` in `f` is preceded, on its path, by a
/// modality whose pattern value is exactly `x`.
inline bool bound_on_use(const std::string& x, const Formula& f) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FTrue> || std::is_same_v<T, FVar>) {
          return true;
        } else if constexpr (std::is_same_v<T, FPred>) {
          return !free_vars(n.pred).count(x);
        } else if constexpr (std::is_same_v<T, FAnd>) {
          return bound_on_use(x, n.lhs) && bound_on_use(x, n.rhs);
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return bound_on_use(x, n.hyp) && bound_on_use(x, n.concl);
        } else if constexpr (std::is_same_v<T, FForall>) {
          return n.var == x || bound_on_use(x, n.body);
        } else if constexpr (std::is_same_v<T, FMu>) {
          return bound_on_use(x, n.body);
        } else {
          const Expr* value = nullptr;
          if (auto* c = std::get_if<CommAction>(&n.action.v)) value = &c->value;
          if (auto* o = std::get_if<ChanOutAction>(&n.action.v)) value = &o->value;
          if (value) {
            if (auto* v = std::get_if<EVar>(&value->node().v); v && v->name == x) return true;
            if (free_vars(*value).count(x)) return false;
          } else if (auto* u = std::get_if<UpdateAction>(&n.action.v)) {
            for (const auto& a : u->update.assignments)
              if (free_vars(a.rhs).count(x)) return false;
          }
          return bound_on_use(x, n.body);
        }
      },
      f.node().v);
}

struct Outcome {
  VerdictKind kind = VerdictKind::Holds;
  Trace witness;  // stored reversed while unwinding
  std::string reason;
};

/// The transition system of a process with its virtual state.
class ProcessSystem {
 public:
  using State = Config;
  struct Step {
    Action action;
    Config target;
    bool cut = false;  // beyond the exploration bound
  };

  explicit ProcessSystem(LtsOptions o) : lts_(o) {}

  std::vector<Step> steps(const Config& c) const {
    std::vector<Step> out;
    for (auto& t : step(c, lts_)) out.push_back({std::move(t.action), std::move(t.target)});
    return out;
  }
  const VirtualState& store(const Config& c) const { return c.state; }
  std::string key(const Config& c) const { return print_config(c); }

  /// The state an update pattern prescribes, if `pat` is one.
  std::optional<VirtualState> effect(const Action& pat, const VirtualState& s,
                                     const std::map<std::string, Value>& vars) const {
    if (auto* u = std::get_if<UpdateAction>(&pat.v)) return apply_update(u->update, s, vars);
    return std::nullopt;
  }
  bool is_update(const Action& a) const { return std::holds_alternative<UpdateAction>(a.v); }

  /// Values a probe pattern reads without moving, if `pat` is one.
  std::optional<std::vector<Value>> probe(const Action&, const Config&) const { return std::nullopt; }

 private:
  LtsOptions lts_;
};

template <class System>
class Checker {
 public:
  using State = typename System::State;

  Checker(System sys, int mu_depth, int sort_bound) : sys_(std::move(sys)), mu_depth_(mu_depth), sort_bound_(sort_bound) {}

  std::size_t obligations() const { return obligations_; }

  Outcome check(const State& c, const Formula& f, const SatEnv& env) {
    ++obligations_;
    // Every connective is conjunctive, so an obligation's outcome can be
    // shared across paths. Cycles are cut at recursion variables; an
    // outcome resting on an assumption there only matters when that
    // assumption fails, and then so does the whole check. The unfolding
    // budget left is part of the key since it decides inconclusive outcomes.
    std::string key = std::to_string(reinterpret_cast<std::uintptr_t>(&f.node())) + "|" + sys_.key(c) + "|" +
                      relevant_key(f, env);
    for (const auto& [name, depth] : unfolds_)
      if (depth) key += "|" + name + "^" + std::to_string(depth);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Outcome o = std::visit([&](const auto& n) { return on(c, f, n, env); }, f.node().v);
    memo_.emplace(std::move(key), o);
    return o;
  }

 private:
  static Outcome holds() { return {}; }
  static Outcome fails(std::string why) { return {VerdictKind::Fails, {}, std::move(why)}; }

  // Fails dominates; then inconclusive.
  static bool combine(Outcome& acc, Outcome o) {
    if (o.kind == VerdictKind::Fails) {
      acc = std::move(o);
      return false;
    }
    if (o.kind == VerdictKind::Inconclusive && acc.kind == VerdictKind::Holds) acc = std::move(o);
    return true;
  }

  Outcome on(const State&, const Formula&, const FTrue&, const SatEnv&) { return holds(); }

  Outcome on(const State& c, const Formula&, const FPred& n, const SatEnv& env) {
    if (holds_pred(n.pred, c, env)) return holds();
    return fails("`" + print_expr(n.pred) + "` is false at {" + print_state(sys_.store(c)) + "}" + describe(env, n.pred));
  }

  Outcome on(const State& c, const Formula&, const FAnd& n, const SatEnv& env) {
    Outcome acc;
    if (!combine(acc, check(c, n.lhs, env))) return acc;
    combine(acc, check(c, n.rhs, env));
    return acc;
  }

  Outcome on(const State& c, const Formula&, const FImplies& n, const SatEnv& env) {
    if (!hypothesis(n.hyp, c, env)) return holds();
    return check(c, n.concl, env);
  }

  Outcome on(const State& c, const Formula&, const FForall& n, const SatEnv& env) {
    if (n.sort == Sort::Session) {
      SatEnv inner = env;
      inner.sessions[n.var] = std::nullopt;
      inner.vars.erase(n.var);
      return check(c, n.body, inner);
    }
    Domain dom = domain_of(n.sort, sort_bound_);
    // When every use of the variable sits behind a modality whose pattern
    // binds it, only values some transition carries can make a difference:
    // bind it on first match instead of enumerating the domain.
    if (bound_on_use(n.var, n.body)) {
      SatEnv inner = env;
      inner.vars.erase(n.var);
      inner.lazy[n.var] = dom;
      return check(c, n.body, inner);
    }
    Outcome acc;
    for (const Value& v : dom.values()) {
      SatEnv inner = env;
      inner.vars[n.var] = v;
      if (!combine(acc, check(c, n.body, inner))) return acc;
    }
    return acc;
  }

  Outcome on(const State& c, const Formula&, const FMust& n, const SatEnv& env) {
    Outcome acc;
    if (auto values = sys_.probe(n.action, c)) {
      const auto& o = std::get<ChanOutAction>(n.action.v);
      for (const Value& v : *values) {
        SatEnv inner = env;
        if (auto* x = std::get_if<EVar>(&o.value.node().v); x && !env.vars.count(x->name)) {
          if (auto d = env.lazy.find(x->name); d != env.lazy.end() && !d->second.contains(v)) continue;
          inner.vars[x->name] = v;
        } else if (eval(o.value, binding(c, env)) != v) {
          continue;
        }
        if (!combine(acc, check(c, n.body, inner))) return acc;
      }
      return acc;
    }
    for (const auto& t : sys_.steps(c)) {
      auto matched = match(n.action, t, c, env);
      if (!matched) continue;
      if (!combine(acc, descend(t, n.body, *matched))) return acc;
    }
    return acc;
  }

  Outcome on(const State& c, const Formula&, const FMu& n, const SatEnv& env) {
    SatEnv inner = env;
    inner.mu[n.name] = n.body;
    return check(c, n.body, inner);
  }

  Outcome on(const State& c, const Formula&, const FVar& n, const SatEnv& env) {
    auto it = env.mu.find(n.name);
    if (it == env.mu.end()) throw Error("satisfaction.unbound", "unbound recursion variable `" + n.name + "`");
    // Revisiting the same configuration under the same obligation closes a
    // loop: greatest fixed point.
    std::string key = n.name + "|" + sys_.key(c) + "|" + relevant_key(it->second, env);
    if (on_path_.count(key)) return holds();
    int& depth = unfolds_[n.name];
    if (depth >= mu_depth_) {
      return {VerdictKind::Inconclusive, {}, "unfolding bound reached for `" + n.name + "`"};
    }
    ++depth;
    on_path_.insert(key);
    Outcome o = check(c, it->second, env);
    on_path_.erase(key);
    --depth;
    return o;
  }

  Outcome descend(const typename System::Step& t, const Formula& body, const SatEnv& env) {
    Outcome o = t.cut ? Outcome{VerdictKind::Inconclusive, {}, "exploration bound reached"} : check(t.target, body, env);
    if (!o.witness.empty() || o.kind != VerdictKind::Holds) o.witness.push_back(t.action);
    return o;
  }

  // -- matching ---------------------------------------------------------------

  Binding binding(const State& c, const SatEnv& env) const { return Binding{env.vars, sys_.store(c)}; }

  bool holds_pred(const Expr& e, const State& c, const SatEnv& env) const { return mpsa::holds(e, binding(c, env)); }

  bool hypothesis(const Formula& f, const State& c, const SatEnv& env) const {
    return std::visit(
        [&](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FTrue>) {
            return true;
          } else if constexpr (std::is_same_v<T, FPred>) {
            return holds_pred(n.pred, c, env);
          } else if constexpr (std::is_same_v<T, FAnd>) {
            return hypothesis(n.lhs, c, env) && hypothesis(n.rhs, c, env);
          } else if constexpr (std::is_same_v<T, FImplies>) {
            return !hypothesis(n.hyp, c, env) || hypothesis(n.concl, c, env);
          } else {
            throw Error("satisfaction.positivity", "implication antecedent must be a predicate");
          }
        },
        f.node().v);
  }

  static bool match_session(const std::string& pat, const std::string& actual, SatEnv& env) {
    auto it = env.sessions.find(pat);
    if (it == env.sessions.end()) return pat == actual;
    if (it->second) return *it->second == actual;
    it->second = actual;
    return true;
  }

  bool match_value(const Expr& pat, const Expr& actual_lit, const State& c, const SatEnv& env, SatEnv& out) const {
    Value actual = std::get<ELit>(actual_lit.node().v).value;
    if (auto* v = std::get_if<EVar>(&pat.node().v); v && !env.vars.count(v->name)) {
      if (auto d = env.lazy.find(v->name); d != env.lazy.end() && !d->second.contains(actual)) return false;
      out.vars[v->name] = actual;
      return true;
    }
    return eval(pat, binding(c, env)) == actual;
  }

  std::optional<SatEnv> match(const Action& pat, const typename System::Step& t, const State& c,
                              const SatEnv& env) const {
    SatEnv out = env;
    const Action& a = t.action;
    // Updates are matched by effect: the step must leave the state the
    // pattern's update prescribes.
    if (auto want = sys_.effect(pat, sys_.store(c), env.vars)) {
      if (!sys_.is_update(a) || *want != sys_.store(t.target)) return std::nullopt;
      return out;
    }
    if (auto* p = std::get_if<CommAction>(&pat.v)) {
      auto* q = std::get_if<CommAction>(&a.v);
      if (!q || p->dir != q->dir || p->from != q->from || p->to != q->to) return std::nullopt;
      if (p->label && p->label != q->label) return std::nullopt;
      if (!match_session(p->session, q->session, out)) return std::nullopt;
      if (!match_value(p->value, q->value, c, env, out)) return std::nullopt;
      return out;
    }
    if (auto* p = std::get_if<AcceptAction>(&pat.v)) {
      auto* q = std::get_if<AcceptAction>(&a.v);
      if (!q || p->shared != q->shared || p->role != q->role) return std::nullopt;
      if (!match_session(p->session, q->session, out)) return std::nullopt;
      return out;
    }
    if (auto* p = std::get_if<LabelAction>(&pat.v)) {
      if (auto* q = std::get_if<CommAction>(&a.v); q && q->label == p->label) return out;
      if (auto* q = std::get_if<LabelAction>(&a.v); q && q->label == p->label) return out;
      return std::nullopt;
    }
    if (auto* p = std::get_if<ChanOutAction>(&pat.v)) {
      auto* q = std::get_if<ChanOutAction>(&a.v);
      if (!q || q->channel != p->channel || !std::holds_alternative<ELit>(q->value.node().v)) return std::nullopt;
      if (!match_value(p->value, q->value, c, env, out)) return std::nullopt;
      return out;
    }
    return std::nullopt;
  }

  static std::string describe(const SatEnv& env, const Expr& e) {
    std::string out;
    for (const auto& x : free_vars(e)) {
      auto it = env.vars.find(x);
      if (it != env.vars.end()) out += (out.empty() ? " with " : ", ") + x + " = " + to_string(it->second);
    }
    return out;
  }

  // Only the bindings `f` can observe.
  std::string relevant_key(const Formula& f, const SatEnv& env) {
    const Formula* scope = &f;
    if (auto* x = std::get_if<FVar>(&f.node().v)) {
      if (auto m = env.mu.find(x->name); m != env.mu.end()) scope = &m->second;
    }
    auto [it, fresh] = mentions_.try_emplace(&scope->node());
    if (fresh) mentioned_vars(*scope, it->second);
    std::string out;
    for (const auto& x : it->second) {
      if (auto v = env.vars.find(x); v != env.vars.end()) out += x + "=" + to_string(v->second) + ";";
      else if (env.lazy.count(x)) out += x + "~;";
    }
    for (const auto& [k, v] : env.sessions) out += k + ":" + v.value_or("?") + ";";
    return out;
  }

  System sys_;
  int mu_depth_;
  int sort_bound_;
  std::size_t obligations_ = 0;
  std::set<std::string> on_path_;
  std::map<std::string, int> unfolds_;
  std::unordered_map<std::string, Outcome> memo_;
  std::unordered_map<const FormulaNode*, std::set<std::string>> mentions_;
};

template <class System>
Verdict run_checker(System sys, const typename System::State& c, const Formula& f, int mu_depth, int sort_bound) {
  Checker<System> checker(std::move(sys), mu_depth, sort_bound);
  auto o = checker.check(c, f, {});
  Verdict v;
  v.kind = o.kind;
  v.witness.assign(o.witness.rbegin(), o.witness.rend());
  v.reason = o.reason;
  v.obligations = checker.obligations();
  return v;
}

}  // namespace detail

/// Decides `(P, sigma) |= phi` over bounded domains.
inline Verdict sat(const Config& c, const Formula& f, const SatOptions& opts = {}) {
  LtsOptions lts;
  lts.sort_bound = opts.sort_bound;
  lts.max_unfold = opts.max_unfold;
  return detail::run_checker(detail::ProcessSystem(lts), c, f, opts.mu_depth, opts.sort_bound);
}

/// `(P, sigma) |= C => F<Delta, Gamma>`; vacuous when C fails at sigma.
inline Verdict check_judgement(const Expr& precondition, const SharedEnv& gamma, const SessionEnv& delta,
                               const Process& p, const VirtualState& s, const SatOptions& opts = {}) {
  if (!holds(precondition, s)) return Verdict{};
  return sat(Config{p, s}, env_formula(delta, gamma), opts);
}

}  // namespace mpsa
