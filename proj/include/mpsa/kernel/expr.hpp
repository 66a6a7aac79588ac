#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>

#include "mpsa/kernel/value.hpp"

namespace mpsa {

enum class BinOp { Add, Sub, Mul, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnOp { Not, Neg };

struct ExprNode;

/// Immutable quantifier-free expression over message variables (`x`) and
/// role-local state variables (`@x`). Cheap to copy; shares structure.
class Expr {
 public:
  Expr();  // the literal `true`

  static Expr lit(Value v);
  static Expr integer(std::int64_t i) { return lit(Value{i}); }
  static Expr boolean(bool b) { return lit(Value{b}); }
  static Expr var(std::string name);
  static Expr state(std::string name);
  static Expr unary(UnOp op, Expr arg);
  static Expr binary(BinOp op, Expr lhs, Expr rhs);

  const ExprNode& node() const { return *p_; }

  bool is_true() const;
  bool is_literal() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> p) : p_(std::move(p)) {}
  std::shared_ptr<const ExprNode> p_;
};

struct ELit {
  Value value;
  bool operator==(const ELit&) const = default;
};
struct EVar {
  std::string name;
  bool operator==(const EVar&) const = default;
};
struct EState {
  std::string name;
  bool operator==(const EState&) const = default;
};
struct EUnary {
  UnOp op;
  Expr arg;
  bool operator==(const EUnary&) const = default;
};
struct EBinary {
  BinOp op;
  Expr lhs;
  Expr rhs;
  bool operator==(const EBinary&) const = default;
};

struct ExprNode {
  std::variant<ELit, EVar, EState, EUnary, EBinary> v;
};

inline Expr::Expr() : p_(std::make_shared<const ExprNode>(ExprNode{ELit{Value{true}}})) {}

inline Expr Expr::lit(Value v) { return Expr(std::make_shared<const ExprNode>(ExprNode{ELit{v}})); }
inline Expr Expr::var(std::string name) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{EVar{std::move(name)}}));
}
inline Expr Expr::state(std::string name) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{EState{std::move(name)}}));
}

inline Expr Expr::unary(UnOp op, Expr arg) {
  // Negated integer literals are folded so `-3` has a single representation.
  if (op == UnOp::Neg) {
    if (auto* l = std::get_if<ELit>(&arg.node().v); l && is_int(l->value)) {
      return integer(-as_int(l->value));
    }
  }
  return Expr(std::make_shared<const ExprNode>(ExprNode{EUnary{op, std::move(arg)}}));
}

inline Expr Expr::binary(BinOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{EBinary{op, std::move(lhs), std::move(rhs)}}));
}

inline bool operator==(const Expr& a, const Expr& b) {
  return a.p_ == b.p_ || a.p_->v == b.p_->v;
}

inline bool Expr::is_true() const {
  auto* l = std::get_if<ELit>(&p_->v);
  return l && is_bool(l->value) && std::get<bool>(l->value);
}

inline bool Expr::is_literal() const { return std::holds_alternative<ELit>(p_->v); }

// Convenience builders used throughout the library and tests.
inline Expr operator+(Expr a, Expr b) { return Expr::binary(BinOp::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::binary(BinOp::Sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::binary(BinOp::Mul, std::move(a), std::move(b)); }
inline Expr operator&&(Expr a, Expr b) { return Expr::binary(BinOp::And, std::move(a), std::move(b)); }
inline Expr operator||(Expr a, Expr b) { return Expr::binary(BinOp::Or, std::move(a), std::move(b)); }
inline Expr operator!(Expr a) { return Expr::unary(UnOp::Not, std::move(a)); }
inline Expr eq(Expr a, Expr b) { return Expr::binary(BinOp::Eq, std::move(a), std::move(b)); }
inline Expr ne(Expr a, Expr b) { return Expr::binary(BinOp::Ne, std::move(a), std::move(b)); }
inline Expr lt(Expr a, Expr b) { return Expr::binary(BinOp::Lt, std::move(a), std::move(b)); }
inline Expr le(Expr a, Expr b) { return Expr::binary(BinOp::Le, std::move(a), std::move(b)); }
inline Expr gt(Expr a, Expr b) { return Expr::binary(BinOp::Gt, std::move(a), std::move(b)); }
inline Expr ge(Expr a, Expr b) { return Expr::binary(BinOp::Ge, std::move(a), std::move(b)); }

/// Conjunction that drops literal `true` operands.
inline Expr conj(const Expr& a, const Expr& b) {
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  return a && b;
}

inline bool is_comparison(BinOp op) {
  return op == BinOp::Lt || op == BinOp::Le || op == BinOp::Gt || op == BinOp::Ge ||
         op == BinOp::Eq || op == BinOp::Ne;
}
inline bool is_logical(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

// ---------------------------------------------------------------------------
// Traversals

template <class F>
void visit_expr(const Expr& e, F&& f) {
  f(e);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EUnary>) {
          visit_expr(n.arg, f);
        } else if constexpr (std::is_same_v<T, EBinary>) {
          visit_expr(n.lhs, f);
          visit_expr(n.rhs, f);
        }
      },
      e.node().v);
}

inline std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  visit_expr(e, [&](const Expr& x) {
    if (auto* v = std::get_if<EVar>(&x.node().v)) out.insert(v->name);
  });
  return out;
}

inline std::set<std::string> state_vars(const Expr& e) {
  std::set<std::string> out;
  visit_expr(e, [&](const Expr& x) {
    if (auto* v = std::get_if<EState>(&x.node().v)) out.insert(v->name);
  });
  return out;
}

/// Bottom-up rewrite: `f` is offered every leaf (variables, state variables)
/// and may return a replacement.
inline Expr rewrite_leaves(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& f) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, EUnary>) {
          auto a = rewrite_leaves(n.arg, f);
          return a == n.arg ? e : Expr::unary(n.op, a);
        } else if constexpr (std::is_same_v<T, EBinary>) {
          auto l = rewrite_leaves(n.lhs, f);
          auto r = rewrite_leaves(n.rhs, f);
          return (l == n.lhs && r == n.rhs) ? e : Expr::binary(n.op, l, r);
        } else {
          if (auto r = f(e)) return *r;
          return e;
        }
      },
      e.node().v);
}

using ExprSubst = std::map<std::string, Expr>;

/// Replaces free message variables.
inline Expr subst_vars(const Expr& e, const ExprSubst& s) {
  if (s.empty()) return e;
  return rewrite_leaves(e, [&](const Expr& x) -> std::optional<Expr> {
    if (auto* v = std::get_if<EVar>(&x.node().v)) {
      if (auto it = s.find(v->name); it != s.end()) return it->second;
    }
    return std::nullopt;
  });
}

inline Expr subst_var(const Expr& e, const std::string& name, const Expr& by) {
  return subst_vars(e, ExprSubst{{name, by}});
}

/// Replaces state variables `@x` (keys are bare names without '@').
inline Expr subst_state(const Expr& e, const ExprSubst& s) {
  if (s.empty()) return e;
  return rewrite_leaves(e, [&](const Expr& x) -> std::optional<Expr> {
    if (auto* v = std::get_if<EState>(&x.node().v)) {
      if (auto it = s.find(v->name); it != s.end()) return it->second;
    }
    return std::nullopt;
  });
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: case BinOp::Eq: case BinOp::Ne:
      return 4;
    case BinOp::Add: case BinOp::Sub: return 5;
    case BinOp::Mul: return 6;
  }
  return 0;
}

inline const char* spelling(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::And: return "/\\";
    case BinOp::Or: return "\\/";
  }
  return "?";
}

// Unary `!` sits at 3 (between conjunction and comparison), unary minus at 7.
inline int expr_prec(const Expr& e) {
  if (auto* b = std::get_if<EBinary>(&e.node().v)) return precedence(b->op);
  if (auto* u = std::get_if<EUnary>(&e.node().v)) return u->op == UnOp::Not ? 3 : 7;
  if (auto* l = std::get_if<ELit>(&e.node().v); l && is_int(l->value) && as_int(l->value) < 0) return 7;
  return 8;
}

inline std::string print_expr_at(const Expr& e, int ctx);

inline std::string print_expr_at(const Expr& e, int ctx) {
  std::string body = std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ELit>) {
          return to_string(n.value);
        } else if constexpr (std::is_same_v<T, EVar>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, EState>) {
          return "@" + n.name;
        } else if constexpr (std::is_same_v<T, EUnary>) {
          if (n.op == UnOp::Not) return "!" + print_expr_at(n.arg, 4);
          return "-" + print_expr_at(n.arg, 8);
        } else {
          int p = precedence(n.op);
          // Left-associative: the right operand needs strictly higher
          // precedence; comparisons do not chain at all.
          int lctx = is_comparison(n.op) ? p + 1 : p;
          return print_expr_at(n.lhs, lctx) + " " + spelling(n.op) + " " + print_expr_at(n.rhs, p + 1);
        }
      },
      e.node().v);
  return expr_prec(e) < ctx ? "(" + body + ")" : body;
}

}  // namespace detail

inline std::string print_expr(const Expr& e) { return detail::print_expr_at(e, 0); }

/// Printing for positions delimited by `<...>`, where a top-level `>` would
/// close the bracket: anything at comparison level or below is parenthesised.
inline std::string print_expr_bracketed(const Expr& e) {
  return detail::print_expr_at(e, 5);
}

}  // namespace mpsa
