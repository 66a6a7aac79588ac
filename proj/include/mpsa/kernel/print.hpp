#pragma once

#include <sstream>
#include <string>

#include "mpsa/kernel/ast.hpp"

namespace mpsa {

inline std::string print_update(const Update& u) {
  if (u.is_skip()) return "skip";
  std::string out;
  for (std::size_t i = 0; i < u.assignments.size(); ++i) {
    const auto& a = u.assignments[i];
    if (i) out += ", ";
    if (a.rhs == Expr::state(a.var) + Expr::integer(1)) {
      out += "@" + a.var + "++";
    } else {
      out += "@" + a.var + " := " + print_expr_bracketed(a.rhs);
    }
  }
  return out;
}

inline std::string print_state(const VirtualState& s) {
  std::string out;
  for (const auto& [k, v] : s) {
    if (!out.empty()) out += ", ";
    out += "@" + k + " = " + to_string(v);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

inline void print_assertion_to(std::ostringstream& os, const LocalAssertion& l);

inline void print_abranches(std::ostringstream& os, const std::vector<AssertionBranch>& bs) {
  os << "{ ";
  for (std::size_t i = 0; i < bs.size(); ++i) {
    const auto& b = bs[i];
    if (i) os << "; ";
    os << b.label << "(" << b.var << ":" << to_string(b.sort) << "){" << print_expr(b.pred) << "}<"
       << print_update(b.update) << ">. ";
    print_assertion_to(os, b.cont);
  }
  os << " }";
}

inline void print_assertion_to(std::ostringstream& os, const LocalAssertion& l) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LEnd>) {
          os << "end";
        } else if constexpr (std::is_same_v<T, LSelect>) {
          os << n.partner << "!";
          print_abranches(os, n.branches);
        } else if constexpr (std::is_same_v<T, LBranch>) {
          os << n.partner << "?";
          print_abranches(os, n.branches);
        } else if constexpr (std::is_same_v<T, LRec>) {
          os << "mu " << n.name << "{" << n.init_var << ": " << print_expr(n.init_pred) << "}(" << n.param << ":"
             << to_string(n.sort) << "). ";
          print_assertion_to(os, n.body);
          os << " : " << print_expr(n.invariant);
        } else {
          os << n.name << "(" << n.arg_var << ": " << print_expr(n.arg_pred) << ")";
        }
      },
      l.node().v);
}

inline bool is_par(const Process& p) { return std::holds_alternative<PPar>(p.node().v); }

inline void print_process_to(std::ostringstream& os, const Process& p);

// Prefix continuations bind tighter than `|`.
inline void print_cont(std::ostringstream& os, const Process& p) {
  if (is_par(p)) {
    os << "(";
    print_process_to(os, p);
    os << ")";
  } else {
    print_process_to(os, p);
  }
}

inline void print_process_to(std::ostringstream& os, const Process& p) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PInact>) {
          os << "0";
        } else if constexpr (std::is_same_v<T, PRequest> || std::is_same_v<T, PAccept>) {
          os << (std::is_same_v<T, PRequest> ? "req " : "acc ") << n.shared << "[" << n.role << "](" << n.var
             << "). ";
          print_cont(os, n.body);
        } else if constexpr (std::is_same_v<T, PSelect>) {
          os << n.session << "[" << n.from << "," << n.to << "]!{ ";
          for (std::size_t i = 0; i < n.branches.size(); ++i) {
            const auto& b = n.branches[i];
            if (i) os << "; ";
            os << print_expr(b.guard) << " :: " << b.label << "<" << print_expr_bracketed(b.payload) << ">(" << b.var
               << ")<" << print_update(b.update) << ">. ";
            print_cont(os, b.cont);
          }
          os << " }";
        } else if constexpr (std::is_same_v<T, PBranch>) {
          os << n.session << "[" << n.from << "," << n.to << "]?{ ";
          for (std::size_t i = 0; i < n.branches.size(); ++i) {
            const auto& b = n.branches[i];
            if (i) os << "; ";
            os << b.label << "(" << b.var;
            if (b.sort) os << ":" << to_string(*b.sort);
            os << ")<" << print_update(b.update) << ">. ";
            print_cont(os, b.cont);
          }
          os << " }";
        } else if constexpr (std::is_same_v<T, PPar>) {
          print_process_to(os, n.left);
          os << " | ";
          print_cont(os, n.right);
        } else if constexpr (std::is_same_v<T, PRecDef>) {
          os << "mu " << n.name << "(" << n.param << " := " << print_expr(n.init) << "). ";
          print_cont(os, n.body);
        } else if constexpr (std::is_same_v<T, PRecCall>) {
          os << n.name << "<" << print_expr_bracketed(n.arg) << ">";
        } else {
          os << "<" << print_update(n.update) << ">. ";
          print_cont(os, n.cont);
        }
      },
      p.node().v);
}

}  // namespace detail

inline std::string print_assertion(const LocalAssertion& l) {
  std::ostringstream os;
  detail::print_assertion_to(os, l);
  return os.str();
}

inline std::string print_process(const Process& p) {
  std::ostringstream os;
  detail::print_process_to(os, p);
  return os.str();
}

// ---------------------------------------------------------------------------

inline std::string print_chan(const std::string& s, const std::string& p, const std::string& q) {
  return s + "[" + p + "," + q + "]";
}

/// Action pattern as written inside `[...]`.
inline std::string print_action(const Action& a) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CommAction>) {
          return print_chan(n.session, n.from, n.to) + (n.dir == Direction::Out ? "!" : "?") + n.label.value_or("") +
                 "(" + print_expr(n.value) + ")";
        } else if constexpr (std::is_same_v<T, UpdateAction>) {
          return "<" + print_update(n.update) + ">";
        } else if constexpr (std::is_same_v<T, AcceptAction>) {
          return n.shared + "(" + n.session + "[" + n.role + "])";
        } else if constexpr (std::is_same_v<T, LabelAction>) {
          return n.label;
        } else {
          return "~" + n.channel + "<" + print_expr_bracketed(n.value) + ">";
        }
      },
      a.v);
}

/// One line of a trace dump: `s[p,q]!v`, `s[p,q]?v`, `<@x:=v>`, `a(s[p])`.
inline std::string print_trace_action(const Action& a) {
  if (auto* c = std::get_if<CommAction>(&a.v)) {
    return print_chan(c->session, c->from, c->to) + (c->dir == Direction::Out ? "!" : "?") + print_expr(c->value);
  }
  if (auto* u = std::get_if<UpdateAction>(&a.v)) {
    if (u->update.is_skip()) return "<skip>";
    std::string out = "<";
    for (std::size_t i = 0; i < u->update.assignments.size(); ++i) {
      if (i) out += ", ";
      out += "@" + u->update.assignments[i].var + ":=" + print_expr(u->update.assignments[i].rhs);
    }
    return out + ">";
  }
  return print_action(a);
}

namespace detail {

enum class FCtx { Top, AndLeft, AndRight, Unary };

inline std::string print_formula_at(const Formula& f, FCtx ctx);

inline std::string print_formula_at(const Formula& f, FCtx ctx) {
  auto wrap = [](std::string s) { return "(" + s + ")"; };
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FTrue>) {
          return "true";
        } else if constexpr (std::is_same_v<T, FPred>) {
          // Conjunctions and disjunctions inside a predicate are bracketed so
          // they do not read as formula-level conjunction.
          auto* b = std::get_if<EBinary>(&n.pred.node().v);
          std::string s = print_expr(n.pred);
          if (b && is_logical(b->op)) return wrap(s);
          return s;
        } else if constexpr (std::is_same_v<T, FVar>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, FAnd>) {
          std::string s = print_formula_at(n.lhs, FCtx::AndLeft) + " /\\ " + print_formula_at(n.rhs, FCtx::AndRight);
          return (ctx == FCtx::Unary || ctx == FCtx::AndLeft) ? wrap(s) : s;
        } else if constexpr (std::is_same_v<T, FImplies>) {
          std::string s = print_formula_at(n.hyp, FCtx::Unary) + " => " + print_formula_at(n.concl, FCtx::Top);
          return ctx == FCtx::Top ? s : wrap(s);
        } else if constexpr (std::is_same_v<T, FMust>) {
          std::string head = "[" + print_action(n.action) + "]";
          if (std::holds_alternative<FMust>(n.body.node().v)) return head + print_formula_at(n.body, FCtx::Unary);
          return head + " " + print_formula_at(n.body, FCtx::Unary);
        } else if constexpr (std::is_same_v<T, FForall>) {
          std::string s = "forall " + n.var + ":" + to_string(n.sort) + ". " + print_formula_at(n.body, FCtx::Top);
          return (ctx == FCtx::Top || ctx == FCtx::AndRight) ? s : wrap(s);
        } else {
          std::string s = "mu " + n.name + ". " + print_formula_at(n.body, FCtx::Top);
          return (ctx == FCtx::Top || ctx == FCtx::AndRight) ? s : wrap(s);
        }
      },
      f.node().v);
}

}  // namespace detail

inline std::string print_formula(const Formula& f) { return detail::print_formula_at(f, detail::FCtx::Top); }

}  // namespace mpsa
