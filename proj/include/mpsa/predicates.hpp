#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "mpsa/kernel/ast.hpp"
#include "mpsa/kernel/names.hpp"
#include "mpsa/kernel/print.hpp"

namespace mpsa {

/// Values of message and recursion variables, with the virtual state for
/// `@`-variables.
struct Binding {
  std::map<std::string, Value> vars;
  VirtualState state;
};

inline Value eval(const Expr& e, const Binding& b) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ELit>) {
          return n.value;
        } else if constexpr (std::is_same_v<T, EVar>) {
          auto it = b.vars.find(n.name);
          if (it == b.vars.end()) throw Error("predicates.unbound", "unbound variable `" + n.name + "`");
          return it->second;
        } else if constexpr (std::is_same_v<T, EState>) {
          auto it = b.state.find(n.name);
          if (it == b.state.end()) throw Error("predicates.unbound", "unknown state variable `@" + n.name + "`");
          return it->second;
        } else if constexpr (std::is_same_v<T, EUnary>) {
          Value a = eval(n.arg, b);
          if (n.op == UnOp::Not) return !as_bool(a);
          return -as_int(a);
        } else {
          // Short-circuit so guards like `x != 0 /\ ...` never touch
          // unneeded operands.
          if (n.op == BinOp::And) return as_bool(eval(n.lhs, b)) && as_bool(eval(n.rhs, b));
          if (n.op == BinOp::Or) return as_bool(eval(n.lhs, b)) || as_bool(eval(n.rhs, b));
          Value l = eval(n.lhs, b);
          Value r = eval(n.rhs, b);
          switch (n.op) {
            case BinOp::Add: return as_int(l) + as_int(r);
            case BinOp::Sub: return as_int(l) - as_int(r);
            case BinOp::Mul: return as_int(l) * as_int(r);
            case BinOp::Lt: return as_int(l) < as_int(r);
            case BinOp::Le: return as_int(l) <= as_int(r);
            case BinOp::Gt: return as_int(l) > as_int(r);
            case BinOp::Ge: return as_int(l) >= as_int(r);
            case BinOp::Eq:
              if (l.index() != r.index()) throw Error("predicates.sort", "comparing values of different sorts");
              return l == r;
            case BinOp::Ne:
              if (l.index() != r.index()) throw Error("predicates.sort", "comparing values of different sorts");
              return l != r;
            default: break;
          }
          throw Error("predicates.sort", "bad operator");
        }
      },
      e.node().v);
}

inline bool holds(const Expr& pred, const VirtualState& s, const std::map<std::string, Value>& vars = {}) {
  return as_bool(eval(pred, Binding{vars, s}));
}

inline bool holds(const Expr& pred, const Binding& b) { return as_bool(eval(pred, b)); }

/// Right-hand sides read the pre-state.
inline VirtualState apply_update(const Update& u, const VirtualState& s, const std::map<std::string, Value>& vars = {}) {
  VirtualState out = s;
  Binding b{vars, s};
  for (const auto& a : u.assignments) {
    auto it = out.find(a.var);
    if (it == out.end()) throw Error("predicates.unknown_state", "update of unknown state variable `@" + a.var + "`");
    Value v = eval(a.rhs, b);
    if (v.index() != it->second.index()) throw Error("predicates.sort", "update changes the sort of `@" + a.var + "`");
    it->second = v;
  }
  return out;
}

/// Finite domains for the variables of a validity query. Keys of `state`
/// are state-variable names without '@'.
struct SortContext {
  std::map<std::string, Domain> vars;
  std::map<std::string, Domain> state;
};

inline constexpr std::size_t kDefaultValidityCap = 1'000'000;

struct Validity {
  bool valid = true;
  std::optional<Binding> witness;  // a counterexample when not valid
  std::size_t checked = 0;
};

/// Calls `f` on every assignment of the listed variables drawn from their
/// domains, stopping early when `f` returns false. Returns false if stopped.
inline bool for_each_assignment(const std::vector<std::pair<std::string, Domain>>& vars,
                                const std::vector<std::pair<std::string, Domain>>& states, Binding& b,
                                const std::function<bool(const Binding&)>& f, std::size_t i = 0) {
  std::size_t n = vars.size() + states.size();
  if (i == n) return f(b);
  bool is_state = i >= vars.size();
  const auto& [name, dom] = is_state ? states[i - vars.size()] : vars[i];
  for (const Value& v : dom.values()) {
    (is_state ? b.state[name] : b.vars[name]) = v;
    if (!for_each_assignment(vars, states, b, f, i + 1)) return false;
  }
  return true;
}

/// Bounded validity of `hyp => concl`: exhaustive over the product of the
/// domains of the variables that actually occur. Variables already present
/// in `fixed` are not enumerated.
inline Validity valid_bounded(const Expr& hyp, const Expr& concl, const SortContext& ctx,
                              std::size_t cap = kDefaultValidityCap, const Binding& fixed = {}) {
  std::vector<std::pair<std::string, Domain>> vars, states;
  std::size_t total = 1;
  auto add = [&](const std::string& name, const std::map<std::string, Domain>& doms, bool state,
                 std::vector<std::pair<std::string, Domain>>& out) {
    if (state ? fixed.state.count(name) : fixed.vars.count(name)) return;
    auto it = doms.find(name);
    if (it == doms.end()) {
      throw Error("predicates.unbound", std::string("no domain for ") + (state ? "@" : "") + name);
    }
    out.emplace_back(name, it->second);
    total *= std::max<std::size_t>(it->second.size(), 1);
    if (total > cap) throw Error("predicates.domain_too_large", "validity check exceeds the assignment cap");
  };
  auto fv = free_vars(hyp);
  fv.merge(free_vars(concl));
  auto sv = state_vars(hyp);
  sv.merge(state_vars(concl));
  for (const auto& x : fv) add(x, ctx.vars, false, vars);
  for (const auto& x : sv) add(x, ctx.state, true, states);

  Validity out;
  Binding b = fixed;
  for_each_assignment(vars, states, b, [&](const Binding& cur) {
    ++out.checked;
    if (!holds(hyp, cur)) return true;
    if (holds(concl, cur)) return true;
    out.valid = false;
    out.witness = cur;
    return false;
  });
  return out;
}

inline std::string print_binding(const Binding& b) {
  std::string out;
  for (const auto& [k, v] : b.vars) out += (out.empty() ? "" : ", ") + k + " = " + to_string(v);
  for (const auto& [k, v] : b.state) out += (out.empty() ? "" : ", ") + ("@" + k) + " = " + to_string(v);
  return out;
}

}  // namespace mpsa
