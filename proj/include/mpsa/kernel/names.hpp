#pragma once

#include <set>
#include <string>

#include "mpsa/kernel/ast.hpp"

namespace mpsa {

/// A name not in `avoid`, built from `base` by appending primes then digits.
inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  if (!avoid.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string c = base + std::to_string(i);
    if (!avoid.count(c)) return c;
  }
}

// ---------------------------------------------------------------------------
// Updates

inline std::set<std::string> free_vars(const Update& u) {
  std::set<std::string> out;
  for (const auto& a : u.assignments) out.merge(free_vars(a.rhs));
  return out;
}

inline std::set<std::string> read_state(const Update& u) {
  std::set<std::string> out;
  for (const auto& a : u.assignments) out.merge(state_vars(a.rhs));
  return out;
}

inline std::set<std::string> written_state(const Update& u) {
  std::set<std::string> out;
  for (const auto& a : u.assignments) out.insert(a.var);
  return out;
}

inline Update subst_vars(const Update& u, const ExprSubst& s) {
  Update out = u;
  for (auto& a : out.assignments) a.rhs = subst_vars(a.rhs, s);
  return out;
}

// ---------------------------------------------------------------------------
// Formulae

/// Free names of a formula: session names not bound by a session
/// quantifier, shared names, bare labels and plain channels.
inline std::set<std::string> free_names(const Formula& f) {
  std::set<std::string> out;
  std::function<void(const Formula&, const std::set<std::string>&)> go = [&](const Formula& g,
                                                                             const std::set<std::string>& bound) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FAnd>) {
            go(n.lhs, bound);
            go(n.rhs, bound);
          } else if constexpr (std::is_same_v<T, FImplies>) {
            go(n.concl, bound);
          } else if constexpr (std::is_same_v<T, FMust>) {
            std::visit(
                [&](const auto& a) {
                  using A = std::decay_t<decltype(a)>;
                  if constexpr (std::is_same_v<A, CommAction>) {
                    if (!bound.count(a.session)) out.insert(a.session);
                  } else if constexpr (std::is_same_v<A, AcceptAction>) {
                    out.insert(a.shared);
                    if (!bound.count(a.session)) out.insert(a.session);
                  } else if constexpr (std::is_same_v<A, LabelAction>) {
                    out.insert(a.label);
                  } else if constexpr (std::is_same_v<A, ChanOutAction>) {
                    out.insert(a.channel);
                  }
                },
                n.action.v);
            go(n.body, bound);
          } else if constexpr (std::is_same_v<T, FForall>) {
            if (n.sort == Sort::Session) {
              auto inner = bound;
              inner.insert(n.var);
              go(n.body, inner);
            } else {
              go(n.body, bound);
            }
          } else if constexpr (std::is_same_v<T, FMu>) {
            go(n.body, bound);
          }
        },
        g.node().v);
  };
  go(f, {});
  return out;
}

inline std::set<std::string> action_vars(const Action& a) {
  if (auto* c = std::get_if<CommAction>(&a.v)) return free_vars(c->value);
  if (auto* u = std::get_if<UpdateAction>(&a.v)) return free_vars(u->update);
  if (auto* o = std::get_if<ChanOutAction>(&a.v)) return free_vars(o->value);
  return {};
}

/// Every message variable occurring in `f`, bound or free.
inline std::set<std::string> all_vars(const Formula& f) {
  std::set<std::string> out;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FAnd>) {
            go(n.lhs);
            go(n.rhs);
          } else if constexpr (std::is_same_v<T, FImplies>) {
            go(n.hyp);
            go(n.concl);
          } else if constexpr (std::is_same_v<T, FMust>) {
            out.merge(action_vars(n.action));
            if (auto* a = std::get_if<AcceptAction>(&n.action.v)) out.insert(a->session);
            go(n.body);
          } else if constexpr (std::is_same_v<T, FPred>) {
            out.merge(free_vars(n.pred));
          } else if constexpr (std::is_same_v<T, FForall>) {
            out.insert(n.var);
            go(n.body);
          } else if constexpr (std::is_same_v<T, FMu>) {
            go(n.body);
          }
        },
        g.node().v);
  };
  go(f);
  return out;
}

/// Message variables free in `f`. A variable in the value slot of a
/// communication pattern that is not otherwise in scope binds in the body.
inline std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> out;
  std::function<void(const Formula&, const std::set<std::string>&)> go = [&](const Formula& g,
                                                                             const std::set<std::string>& bound) {
    auto note = [&](const std::set<std::string>& vs) {
      for (const auto& v : vs)
        if (!bound.count(v)) out.insert(v);
    };
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FAnd>) {
            go(n.lhs, bound);
            go(n.rhs, bound);
          } else if constexpr (std::is_same_v<T, FImplies>) {
            go(n.hyp, bound);
            go(n.concl, bound);
          } else if constexpr (std::is_same_v<T, FMust>) {
            auto inner = bound;
            const Expr* slot = nullptr;
            if (auto* c = std::get_if<CommAction>(&n.action.v)) slot = &c->value;
            if (auto* o = std::get_if<ChanOutAction>(&n.action.v)) slot = &o->value;
            auto* v = slot ? std::get_if<EVar>(&slot->node().v) : nullptr;
            if (v && !bound.count(v->name)) {
              inner.insert(v->name);
            } else {
              note(action_vars(n.action));
            }
            if (auto* u = std::get_if<UpdateAction>(&n.action.v)) note(free_vars(u->update));
            go(n.body, inner);
          } else if constexpr (std::is_same_v<T, FPred>) {
            note(free_vars(n.pred));
          } else if constexpr (std::is_same_v<T, FForall>) {
            auto inner = bound;
            inner.insert(n.var);
            go(n.body, inner);
          } else if constexpr (std::is_same_v<T, FMu>) {
            go(n.body, bound);
          }
        },
        g.node().v);
  };
  go(f, {});
  return out;
}

inline Action subst_action(const Action& a, const ExprSubst& s) {
  return std::visit(
      [&](const auto& n) -> Action {
        using T = std::decay_t<decltype(n)>;
        T m = n;
        if constexpr (std::is_same_v<T, CommAction> || std::is_same_v<T, ChanOutAction>) {
          m.value = subst_vars(n.value, s);
        } else if constexpr (std::is_same_v<T, UpdateAction>) {
          m.update = subst_vars(n.update, s);
        }
        return Action{m};
      },
      a.v);
}

/// Substitutes free message variables; binders shadow. Callers must pass
/// closed replacement terms (values) so no capture can occur.
inline Formula subst_formula(const Formula& f, const ExprSubst& s) {
  if (s.empty()) return f;
  return std::visit(
      [&](const auto& n) -> Formula {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FAnd>) {
          return fml::conj(subst_formula(n.lhs, s), subst_formula(n.rhs, s));
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return fml::implies(subst_formula(n.hyp, s), subst_formula(n.concl, s));
        } else if constexpr (std::is_same_v<T, FMust>) {
          return fml::must(subst_action(n.action, s), subst_formula(n.body, s));
        } else if constexpr (std::is_same_v<T, FPred>) {
          return fml::pred(subst_vars(n.pred, s));
        } else if constexpr (std::is_same_v<T, FForall>) {
          auto inner = s;
          inner.erase(n.var);
          return fml::forall(n.var, n.sort, subst_formula(n.body, inner));
        } else if constexpr (std::is_same_v<T, FMu>) {
          return fml::mu(n.name, subst_formula(n.body, s));
        } else {
          return f;
        }
      },
      f.node().v);
}

using NameMap = std::map<std::string, std::string>;

inline std::string rename(const std::string& x, const NameMap& m) {
  auto it = m.find(x);
  return it == m.end() ? x : it->second;
}

/// Renames session names, shared names and roles in actions. Session
/// quantifiers shadow.
inline Formula rename_names(const Formula& f, const NameMap& m) {
  if (m.empty()) return f;
  return std::visit(
      [&](const auto& n) -> Formula {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FAnd>) {
          return fml::conj(rename_names(n.lhs, m), rename_names(n.rhs, m));
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return fml::implies(n.hyp, rename_names(n.concl, m));
        } else if constexpr (std::is_same_v<T, FMust>) {
          Action a = n.action;
          if (auto* c = std::get_if<CommAction>(&a.v)) {
            c->session = rename(c->session, m);
            c->from = rename(c->from, m);
            c->to = rename(c->to, m);
          } else if (auto* c = std::get_if<AcceptAction>(&a.v)) {
            c->shared = rename(c->shared, m);
            c->session = rename(c->session, m);
            c->role = rename(c->role, m);
          } else if (auto* c = std::get_if<LabelAction>(&a.v)) {
            c->label = rename(c->label, m);
          } else if (auto* c = std::get_if<ChanOutAction>(&a.v)) {
            c->channel = rename(c->channel, m);
          }
          return fml::must(a, rename_names(n.body, m));
        } else if constexpr (std::is_same_v<T, FForall>) {
          if (n.sort != Sort::Session) return fml::forall(n.var, n.sort, rename_names(n.body, m));
          auto inner = m;
          inner.erase(n.var);
          return fml::forall(n.var, n.sort, rename_names(n.body, inner));
        } else if constexpr (std::is_same_v<T, FMu>) {
          return fml::mu(n.name, rename_names(n.body, m));
        } else {
          return f;
        }
      },
      f.node().v);
}

// ---------------------------------------------------------------------------
// Processes

/// Free session names and shared names of a process.
inline std::set<std::string> free_names(const Process& p) {
  std::set<std::string> out;
  std::function<void(const Process&, const std::set<std::string>&)> go = [&](const Process& q,
                                                                             const std::set<std::string>& bound) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, PRequest> || std::is_same_v<T, PAccept>) {
            out.insert(n.shared);
            auto inner = bound;
            inner.insert(n.var);
            go(n.body, inner);
          } else if constexpr (std::is_same_v<T, PSelect> || std::is_same_v<T, PBranch>) {
            if (!bound.count(n.session)) out.insert(n.session);
            for (const auto& b : n.branches) go(b.cont, bound);
          } else if constexpr (std::is_same_v<T, PPar>) {
            go(n.left, bound);
            go(n.right, bound);
          } else if constexpr (std::is_same_v<T, PRecDef>) {
            go(n.body, bound);
          } else if constexpr (std::is_same_v<T, PPending>) {
            go(n.cont, bound);
          }
        },
        q.node().v);
  };
  go(p, {});
  return out;
}

/// State variables read or written anywhere in `p`.
inline std::pair<std::set<std::string>, std::set<std::string>> state_footprint(const Process& p) {
  std::set<std::string> reads, writes;
  std::function<void(const Process&)> go = [&](const Process& q) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, PRequest> || std::is_same_v<T, PAccept>) {
            go(n.body);
          } else if constexpr (std::is_same_v<T, PSelect>) {
            for (const auto& b : n.branches) {
              reads.merge(state_vars(b.guard));
              reads.merge(state_vars(b.payload));
              reads.merge(read_state(b.update));
              writes.merge(written_state(b.update));
              go(b.cont);
            }
          } else if constexpr (std::is_same_v<T, PBranch>) {
            for (const auto& b : n.branches) {
              reads.merge(read_state(b.update));
              writes.merge(written_state(b.update));
              go(b.cont);
            }
          } else if constexpr (std::is_same_v<T, PPar>) {
            go(n.left);
            go(n.right);
          } else if constexpr (std::is_same_v<T, PRecDef>) {
            reads.merge(state_vars(n.init));
            go(n.body);
          } else if constexpr (std::is_same_v<T, PRecCall>) {
            reads.merge(state_vars(n.arg));
          } else if constexpr (std::is_same_v<T, PPending>) {
            reads.merge(read_state(n.update));
            writes.merge(written_state(n.update));
            go(n.cont);
          }
        },
        q.node().v);
  };
  go(p);
  return {reads, writes};
}

/// Substitutes free message variables of `p` by closed terms.
inline Process subst_process(const Process& p, const ExprSubst& s) {
  if (s.empty()) return p;
  return std::visit(
      [&](const auto& n) -> Process {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PInact> || std::is_same_v<T, PRequest> || std::is_same_v<T, PAccept>) {
          if constexpr (std::is_same_v<T, PInact>) {
            return p;
          } else {
            T m = n;
            m.body = subst_process(n.body, s);
            return Process(ProcessNode{m});
          }
        } else if constexpr (std::is_same_v<T, PSelect>) {
          PSelect m = n;
          for (auto& b : m.branches) {
            b.guard = subst_vars(b.guard, s);
            b.payload = subst_vars(b.payload, s);
            auto inner = s;
            inner.erase(b.var);
            b.update = subst_vars(b.update, inner);
            b.cont = subst_process(b.cont, inner);
          }
          return Process(ProcessNode{m});
        } else if constexpr (std::is_same_v<T, PBranch>) {
          PBranch m = n;
          for (auto& b : m.branches) {
            auto inner = s;
            inner.erase(b.var);
            b.update = subst_vars(b.update, inner);
            b.cont = subst_process(b.cont, inner);
          }
          return Process(ProcessNode{m});
        } else if constexpr (std::is_same_v<T, PPar>) {
          return proc::par(subst_process(n.left, s), subst_process(n.right, s));
        } else if constexpr (std::is_same_v<T, PRecDef>) {
          auto inner = s;
          inner.erase(n.param);
          return proc::rec(n.name, n.param, subst_vars(n.init, s), subst_process(n.body, inner));
        } else if constexpr (std::is_same_v<T, PRecCall>) {
          return proc::call(n.name, subst_vars(n.arg, s));
        } else {
          return proc::pending(subst_vars(n.update, s), subst_process(n.cont, s));
        }
      },
      p.node().v);
}

/// Renames free session names, shared names and roles. Session binders
/// introduced by request/accept shadow.
inline Process rename_names(const Process& p, const NameMap& m) {
  if (m.empty()) return p;
  return std::visit(
      [&](const auto& n) -> Process {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PInact> || std::is_same_v<T, PRecCall>) {
          return p;
        } else if constexpr (std::is_same_v<T, PRequest> || std::is_same_v<T, PAccept>) {
          T c = n;
          c.shared = rename(n.shared, m);
          c.role = rename(n.role, m);
          auto inner = m;
          inner.erase(n.var);
          c.body = rename_names(n.body, inner);
          return Process(ProcessNode{c});
        } else if constexpr (std::is_same_v<T, PSelect> || std::is_same_v<T, PBranch>) {
          T c = n;
          c.session = rename(n.session, m);
          c.from = rename(n.from, m);
          c.to = rename(n.to, m);
          for (auto& b : c.branches) b.cont = rename_names(b.cont, m);
          return Process(ProcessNode{c});
        } else if constexpr (std::is_same_v<T, PPar>) {
          return proc::par(rename_names(n.left, m), rename_names(n.right, m));
        } else if constexpr (std::is_same_v<T, PRecDef>) {
          return proc::rec(n.name, n.param, n.init, rename_names(n.body, m));
        } else {
          return proc::pending(n.update, rename_names(n.cont, m));
        }
      },
      p.node().v);
}

/// Replaces every call `X<e>` by `repl(e)`; inner definitions of `X` shadow.
inline Process replace_calls(const Process& p, const std::string& name,
                             const std::function<Process(const Expr&)>& repl) {
  return std::visit(
      [&](const auto& n) -> Process {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PInact>) {
          return p;
        } else if constexpr (std::is_same_v<T, PRecCall>) {
          return n.name == name ? repl(n.arg) : p;
        } else if constexpr (std::is_same_v<T, PRequest> || std::is_same_v<T, PAccept>) {
          T c = n;
          c.body = replace_calls(n.body, name, repl);
          return Process(ProcessNode{c});
        } else if constexpr (std::is_same_v<T, PSelect> || std::is_same_v<T, PBranch>) {
          T c = n;
          for (auto& b : c.branches) b.cont = replace_calls(b.cont, name, repl);
          return Process(ProcessNode{c});
        } else if constexpr (std::is_same_v<T, PPar>) {
          return proc::par(replace_calls(n.left, name, repl), replace_calls(n.right, name, repl));
        } else if constexpr (std::is_same_v<T, PRecDef>) {
          if (n.name == name) return p;
          return proc::rec(n.name, n.param, n.init, replace_calls(n.body, name, repl));
        } else {
          return proc::pending(n.update, replace_calls(n.cont, name, repl));
        }
      },
      p.node().v);
}

// ---------------------------------------------------------------------------
// Assertions

/// Session partners and labels are not names; assertions mention only
/// state variables and recursion variables.
inline std::set<std::string> state_vars(const LocalAssertion& l) {
  std::set<std::string> out;
  std::function<void(const LocalAssertion&)> go = [&](const LocalAssertion& a) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, LSelect> || std::is_same_v<T, LBranch>) {
            for (const auto& b : n.branches) {
              out.merge(state_vars(b.pred));
              out.merge(read_state(b.update));
              out.merge(written_state(b.update));
              go(b.cont);
            }
          } else if constexpr (std::is_same_v<T, LRec>) {
            out.merge(state_vars(n.init_pred));
            out.merge(state_vars(n.invariant));
            go(n.body);
          } else if constexpr (std::is_same_v<T, LCall>) {
            out.merge(state_vars(n.arg_pred));
          }
        },
        a.node().v);
  };
  go(l);
  return out;
}

}  // namespace mpsa
