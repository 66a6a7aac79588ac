#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mpsa/kernel/expr.hpp"

namespace mpsa {

// ---------------------------------------------------------------------------
// Updates

struct Assignment {
  std::string var;  // state variable name, without '@'
  Expr rhs;
  bool operator==(const Assignment&) const = default;
};

/// A state update `@x := e, @y := e'`. The empty update is `skip`.
/// Right-hand sides read the pre-state; assigned variables are distinct.
struct Update {
  std::vector<Assignment> assignments;

  bool is_skip() const { return assignments.empty(); }
  bool operator==(const Update&) const = default;

  static Update skip() { return {}; }
  static Update assign(std::string var, Expr rhs) { return Update{{Assignment{std::move(var), std::move(rhs)}}}; }
  static Update increment(const std::string& var) { return assign(var, Expr::state(var) + Expr::integer(1)); }
};

// ---------------------------------------------------------------------------
// Local assertions

struct AssertionNode;

class LocalAssertion {
 public:
  LocalAssertion();  // end
  explicit LocalAssertion(AssertionNode n);
  const AssertionNode& node() const { return *p_; }
  friend bool operator==(const LocalAssertion& a, const LocalAssertion& b);

 private:
  std::shared_ptr<const AssertionNode> p_;
};

/// One choice `l(x:U){A}<E>.L` of a selection or branching.
struct AssertionBranch {
  std::string label;
  std::string var;
  Sort sort = Sort::Int;
  Expr pred;
  Update update;
  LocalAssertion cont;
  bool operator==(const AssertionBranch&) const = default;
};

struct LSelect {
  std::string partner;
  std::vector<AssertionBranch> branches;
  bool operator==(const LSelect&) const = default;
};

struct LBranch {
  std::string partner;
  std::vector<AssertionBranch> branches;
  bool operator==(const LBranch&) const = default;
};

/// `mu t{y: A'}(x:S). L : A`
struct LRec {
  std::string name;
  std::string param;
  Sort sort = Sort::Int;
  std::string init_var;
  Expr init_pred;
  Expr invariant;
  LocalAssertion body;
  bool operator==(const LRec&) const = default;
};

/// `t(y: A')`
struct LCall {
  std::string name;
  std::string arg_var;
  Expr arg_pred;
  bool operator==(const LCall&) const = default;
};

struct LEnd {
  bool operator==(const LEnd&) const = default;
};

struct AssertionNode {
  std::variant<LEnd, LSelect, LBranch, LRec, LCall> v;
};

inline LocalAssertion::LocalAssertion() : p_(std::make_shared<const AssertionNode>(AssertionNode{LEnd{}})) {}
inline LocalAssertion::LocalAssertion(AssertionNode n) : p_(std::make_shared<const AssertionNode>(std::move(n))) {}
inline bool operator==(const LocalAssertion& a, const LocalAssertion& b) {
  return a.p_ == b.p_ || a.p_->v == b.p_->v;
}

namespace la {
inline LocalAssertion end() { return {}; }
inline LocalAssertion select(std::string partner, std::vector<AssertionBranch> bs) {
  return LocalAssertion(AssertionNode{LSelect{std::move(partner), std::move(bs)}});
}
inline LocalAssertion branch(std::string partner, std::vector<AssertionBranch> bs) {
  return LocalAssertion(AssertionNode{LBranch{std::move(partner), std::move(bs)}});
}
inline LocalAssertion rec(std::string name, std::string param, Sort sort, std::string init_var, Expr init_pred,
                          Expr invariant, LocalAssertion body) {
  return LocalAssertion(AssertionNode{LRec{std::move(name), std::move(param), sort, std::move(init_var),
                                           std::move(init_pred), std::move(invariant), std::move(body)}});
}
inline LocalAssertion call(std::string name, std::string arg_var, Expr arg_pred) {
  return LocalAssertion(AssertionNode{LCall{std::move(name), std::move(arg_var), std::move(arg_pred)}});
}
}  // namespace la

// ---------------------------------------------------------------------------
// Processes

struct ProcessNode;

class Process {
 public:
  Process();  // 0
  explicit Process(ProcessNode n);
  const ProcessNode& node() const { return *p_; }
  friend bool operator==(const Process& a, const Process& b);

 private:
  std::shared_ptr<const ProcessNode> p_;
};

/// `e :: l<e'>(x)<E>. P`
struct GuardedBranch {
  Expr guard;
  std::string label;
  Expr payload;
  std::string var;
  Update update;
  Process cont;
  bool operator==(const GuardedBranch&) const = default;
};

/// `l(x)<E>. P`, optionally `l(x:S)<E>. P`; the sort fixes the values the
/// open process accepts (Int when omitted).
struct InputBranch {
  std::string label;
  std::string var;
  std::optional<Sort> sort;
  Update update;
  Process cont;
  bool operator==(const InputBranch&) const = default;
};

struct PInact {
  bool operator==(const PInact&) const = default;
};

/// `req u[r](y).P` / `acc u[r](y).P`: join a session on shared name `u`
/// playing role `r`, binding the session to `y`.
struct PRequest {
  std::string shared;
  std::string role;
  std::string var;
  Process body;
  bool operator==(const PRequest&) const = default;
};
struct PAccept {
  std::string shared;
  std::string role;
  std::string var;
  Process body;
  bool operator==(const PAccept&) const = default;
};

/// Guarded command on session channel `k[from,to]`.
struct PSelect {
  std::string session;
  std::string from;
  std::string to;
  std::vector<GuardedBranch> branches;
  bool operator==(const PSelect&) const = default;
};

/// Branching on `k[from,to]`: receives from `from`, plays `to`.
struct PBranch {
  std::string session;
  std::string from;
  std::string to;
  std::vector<InputBranch> branches;
  bool operator==(const PBranch&) const = default;
};

struct PPar {
  Process left;
  Process right;
  bool operator==(const PPar&) const = default;
};

/// `mu X(x := e). P`
struct PRecDef {
  std::string name;
  std::string param;
  Expr init;
  Process body;
  bool operator==(const PRecDef&) const = default;
};

/// `X<e>`
struct PRecCall {
  std::string name;
  Expr arg;
  bool operator==(const PRecCall&) const = default;
};

/// `<E>. P`: a communication has happened and its state update is due.
/// Only produced by the transition system; also accepted by the parser so
/// every reachable configuration prints and reparses.
struct PPending {
  Update update;
  Process cont;
  bool operator==(const PPending&) const = default;
};

struct ProcessNode {
  std::variant<PInact, PRequest, PAccept, PSelect, PBranch, PPar, PRecDef, PRecCall, PPending> v;
};

inline Process::Process() : p_(std::make_shared<const ProcessNode>(ProcessNode{PInact{}})) {}
inline Process::Process(ProcessNode n) : p_(std::make_shared<const ProcessNode>(std::move(n))) {}
inline bool operator==(const Process& a, const Process& b) { return a.p_ == b.p_ || a.p_->v == b.p_->v; }

namespace proc {
inline Process inact() { return {}; }
inline Process request(std::string u, std::string role, std::string y, Process body) {
  return Process(ProcessNode{PRequest{std::move(u), std::move(role), std::move(y), std::move(body)}});
}
inline Process accept(std::string u, std::string role, std::string y, Process body) {
  return Process(ProcessNode{PAccept{std::move(u), std::move(role), std::move(y), std::move(body)}});
}
inline Process select(std::string k, std::string from, std::string to, std::vector<GuardedBranch> bs) {
  return Process(ProcessNode{PSelect{std::move(k), std::move(from), std::move(to), std::move(bs)}});
}
inline Process branch(std::string k, std::string from, std::string to, std::vector<InputBranch> bs) {
  return Process(ProcessNode{PBranch{std::move(k), std::move(from), std::move(to), std::move(bs)}});
}
inline Process par(Process l, Process r) { return Process(ProcessNode{PPar{std::move(l), std::move(r)}}); }
inline Process rec(std::string name, std::string param, Expr init, Process body) {
  return Process(ProcessNode{PRecDef{std::move(name), std::move(param), std::move(init), std::move(body)}});
}
inline Process call(std::string name, Expr arg) {
  return Process(ProcessNode{PRecCall{std::move(name), std::move(arg)}});
}
inline Process pending(Update u, Process cont) {
  return Process(ProcessNode{PPending{std::move(u), std::move(cont)}});
}
}  // namespace proc

// ---------------------------------------------------------------------------
// Actions

enum class Direction { In, Out };

/// `s[p,q]!l(v)` / `s[p,q]?l(v)`. In transitions `value` is a literal and
/// `label` is always set; in formula patterns `value` may be a variable and
/// an absent label matches any label.
struct CommAction {
  Direction dir = Direction::Out;
  std::string session;
  std::string from;
  std::string to;
  std::optional<std::string> label;
  Expr value;
  bool operator==(const CommAction&) const = default;
};

/// State update step. In transitions every right-hand side is a literal
/// (the update resolved against the pre-state).
struct UpdateAction {
  Update update;
  bool operator==(const UpdateAction&) const = default;
};

/// `a(s[p])`
struct AcceptAction {
  std::string shared;
  std::string session;
  std::string role;
  bool operator==(const AcceptAction&) const = default;
};

/// Abstract interaction named only by a label, e.g. `[1]`.
struct LabelAction {
  std::string label;
  bool operator==(const LabelAction&) const = default;
};

/// Output on a plain channel `~c<v>`; used by the store encoding.
struct ChanOutAction {
  std::string channel;
  Expr value;
  bool operator==(const ChanOutAction&) const = default;
};

struct Action {
  std::variant<CommAction, UpdateAction, AcceptAction, LabelAction, ChanOutAction> v;
  bool operator==(const Action&) const = default;
};

namespace act {
inline Action output(std::string s, std::string p, std::string q, Expr v, std::optional<std::string> label = {}) {
  return Action{CommAction{Direction::Out, std::move(s), std::move(p), std::move(q), std::move(label), std::move(v)}};
}
inline Action input(std::string s, std::string p, std::string q, Expr v, std::optional<std::string> label = {}) {
  return Action{CommAction{Direction::In, std::move(s), std::move(p), std::move(q), std::move(label), std::move(v)}};
}
inline Action update(Update u) { return Action{UpdateAction{std::move(u)}}; }
inline Action accept(std::string a, std::string s, std::string p) {
  return Action{AcceptAction{std::move(a), std::move(s), std::move(p)}};
}
inline Action label(std::string l) { return Action{LabelAction{std::move(l)}}; }
inline Action chan_out(std::string c, Expr v) { return Action{ChanOutAction{std::move(c), std::move(v)}}; }
}  // namespace act

inline bool is_communication(const Action& a) { return std::holds_alternative<CommAction>(a.v); }

// ---------------------------------------------------------------------------
// Formulae

struct FormulaNode;

class Formula {
 public:
  Formula();  // true
  explicit Formula(FormulaNode n);
  const FormulaNode& node() const { return *p_; }
  bool is_true() const;
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  std::shared_ptr<const FormulaNode> p_;
};

struct FTrue {
  bool operator==(const FTrue&) const = default;
};
struct FAnd {
  Formula lhs;
  Formula rhs;
  bool operator==(const FAnd&) const = default;
};
struct FImplies {
  Formula hyp;
  Formula concl;
  bool operator==(const FImplies&) const = default;
};
/// Box modality `[l] phi`.
struct FMust {
  Action action;
  Formula body;
  bool operator==(const FMust&) const = default;
};
struct FPred {
  Expr pred;
  bool operator==(const FPred&) const = default;
};
struct FForall {
  std::string var;
  Sort sort = Sort::Int;
  Formula body;
  bool operator==(const FForall&) const = default;
};
struct FMu {
  std::string name;
  Formula body;
  bool operator==(const FMu&) const = default;
};
struct FVar {
  std::string name;
  bool operator==(const FVar&) const = default;
};

struct FormulaNode {
  std::variant<FTrue, FAnd, FImplies, FMust, FPred, FForall, FMu, FVar> v;
};

inline Formula::Formula() : p_(std::make_shared<const FormulaNode>(FormulaNode{FTrue{}})) {}
inline Formula::Formula(FormulaNode n) : p_(std::make_shared<const FormulaNode>(std::move(n))) {}
inline bool Formula::is_true() const { return std::holds_alternative<FTrue>(p_->v); }
inline bool operator==(const Formula& a, const Formula& b) { return a.p_ == b.p_ || a.p_->v == b.p_->v; }

namespace fml {
inline Formula tt() { return {}; }
inline Formula conj(Formula a, Formula b) { return Formula(FormulaNode{FAnd{std::move(a), std::move(b)}}); }
inline Formula implies(Formula a, Formula b) { return Formula(FormulaNode{FImplies{std::move(a), std::move(b)}}); }
inline Formula must(Action a, Formula b) { return Formula(FormulaNode{FMust{std::move(a), std::move(b)}}); }
/// The literal predicate `true` is the formula `true`.
inline Formula pred(Expr e) {
  if (e.is_true()) return tt();
  return Formula(FormulaNode{FPred{std::move(e)}});
}
inline Formula forall(std::string x, Sort s, Formula b) {
  return Formula(FormulaNode{FForall{std::move(x), s, std::move(b)}});
}
inline Formula mu(std::string x, Formula b) { return Formula(FormulaNode{FMu{std::move(x), std::move(b)}}); }
inline Formula var(std::string x) { return Formula(FormulaNode{FVar{std::move(x)}}); }

/// Right-nested conjunction of a list; empty list is `true`.
inline Formula conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return tt();
  Formula acc = fs.back();
  for (auto i = fs.size() - 1; i-- > 0;) acc = conj(fs[i], acc);
  return acc;
}
}  // namespace fml

// ---------------------------------------------------------------------------
// States and environments

/// Virtual state: state-variable name (without '@') to value.
using VirtualState = std::map<std::string, Value>;

struct SessionRole {
  std::string session;
  std::string role;
  auto operator<=>(const SessionRole&) const = default;
  bool operator==(const SessionRole&) const = default;
};

using RoleTable = std::map<std::string, LocalAssertion>;
using SharedEnv = std::map<std::string, RoleTable>;
using SessionEnv = std::map<SessionRole, LocalAssertion>;

/// The judgement environment (C, Gamma, Delta).
struct Env {
  Expr precondition;
  SharedEnv gamma;
  SessionEnv delta;
};

}  // namespace mpsa
