#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mpsa/kernel/names.hpp"
#include "mpsa/kernel/parse.hpp"
#include "mpsa/predicates.hpp"

namespace mpsa {

// ---------------------------------------------------------------------------
// Unasserted types

struct UTypeNode;

class UType {
 public:
  UType();  // end
  explicit UType(UTypeNode n);
  const UTypeNode& node() const { return *p_; }
  friend bool operator==(const UType& a, const UType& b);

 private:
  std::shared_ptr<const UTypeNode> p_;
};

struct UChoice {
  std::string label;
  Sort sort = Sort::Int;
  UType cont;
  bool operator==(const UChoice&) const = default;
};
struct UEnd {
  bool operator==(const UEnd&) const = default;
};
struct USelect {
  std::string partner;
  std::vector<UChoice> branches;
  bool operator==(const USelect&) const = default;
};
struct UBranch {
  std::string partner;
  std::vector<UChoice> branches;
  bool operator==(const UBranch&) const = default;
};
struct URec {
  std::string name;
  UType body;
  bool operator==(const URec&) const = default;
};
struct UCall {
  std::string name;
  bool operator==(const UCall&) const = default;
};

struct UTypeNode {
  std::variant<UEnd, USelect, UBranch, URec, UCall> v;
};

inline UType::UType() : p_(std::make_shared<const UTypeNode>(UTypeNode{UEnd{}})) {}
inline UType::UType(UTypeNode n) : p_(std::make_shared<const UTypeNode>(std::move(n))) {}
inline bool operator==(const UType& a, const UType& b) { return a.p_ == b.p_ || a.p_->v == b.p_->v; }

inline std::string print_utype(const UType& t) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, UEnd>) {
          return "end";
        } else if constexpr (std::is_same_v<T, USelect> || std::is_same_v<T, UBranch>) {
          std::string out = n.partner + (std::is_same_v<T, USelect> ? "!{" : "?{");
          for (std::size_t i = 0; i < n.branches.size(); ++i) {
            const auto& b = n.branches[i];
            out += (i ? "; " : "") + b.label + "(" + to_string(b.sort) + ")." + print_utype(b.cont);
          }
          return out + "}";
        } else if constexpr (std::is_same_v<T, URec>) {
          return "mu " + n.name + ". " + print_utype(n.body);
        } else {
          return n.name;
        }
      },
      t.node().v);
}

/// Drops predicates, updates and recursion parameters.
inline UType erase(const LocalAssertion& l) {
  return std::visit(
      [](const auto& n) -> UType {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LEnd>) {
          return {};
        } else if constexpr (std::is_same_v<T, LSelect> || std::is_same_v<T, LBranch>) {
          std::vector<UChoice> bs;
          for (const auto& b : n.branches) bs.push_back({b.label, b.sort, erase(b.cont)});
          if constexpr (std::is_same_v<T, LSelect>) {
            return UType(UTypeNode{USelect{n.partner, bs}});
          } else {
            return UType(UTypeNode{UBranch{n.partner, bs}});
          }
        } else if constexpr (std::is_same_v<T, LRec>) {
          return UType(UTypeNode{URec{n.name, erase(n.body)}});
        } else {
          return UType(UTypeNode{UCall{n.name}});
        }
      },
      l.node().v);
}

using USessionEnv = std::map<SessionRole, UType>;

inline USessionEnv erase_env(const SessionEnv& delta) {
  USessionEnv out;
  for (const auto& [k, l] : delta) out[k] = erase(l);
  return out;
}

/// Outcome of a type check, with the derivation as indented text.
struct TypingResult {
  bool ok = true;
  std::string reason;
  std::string derivation;
};

namespace detail {

inline bool is_end(const UType& t) { return std::holds_alternative<UEnd>(t.node().v); }
inline bool is_end(const LocalAssertion& l) { return std::holds_alternative<LEnd>(l.node().v); }

struct Reject {
  std::string reason;
};

template <class Entry>
std::pair<std::map<SessionRole, Entry>, std::map<SessionRole, Entry>> split_env(const std::map<SessionRole, Entry>& env,
                                                                                const Process& l, const Process& r) {
  auto fl = free_names(l);
  auto fr = free_names(r);
  std::map<SessionRole, Entry> left, right;
  for (const auto& [k, t] : env) {
    bool inl = fl.count(k.session) > 0, inr = fr.count(k.session) > 0;
    if (inl && inr) throw Reject{"session `" + k.session + "` used on both sides of a parallel composition"};
    (inr ? right : left)[k] = t;
  }
  return {left, right};
}

class UnassertedChecker {
 public:
  explicit UnassertedChecker(const SharedEnv& gamma) : gamma_(gamma) {}

  void line(int depth, const std::string& s) { out_ << std::string(2 * depth, ' ') << s << "\n"; }
  std::string derivation() const { return out_.str(); }

  struct RecInfo {
    SessionRole at;
    std::string type_var;
  };

  // Peels recursion binders, recording their bodies for later calls.
  UType head(UType t) {
    for (int guard = 0; guard < 64; ++guard) {
      if (auto* r = std::get_if<URec>(&t.node().v)) {
        tvars_[r->name] = r->body;
        t = r->body;
      } else if (auto* c = std::get_if<UCall>(&t.node().v)) {
        auto it = tvars_.find(c->name);
        if (it == tvars_.end()) throw Reject{"unbound type variable `" + c->name + "`"};
        t = it->second;
      } else {
        return t;
      }
    }
    throw Reject{"unguarded recursive type"};
  }

  void check(const Process& p, USessionEnv env, SortScope scope, std::map<std::string, RecInfo> recs, int depth) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, PInact>) {
            for (const auto& [k, t] : env) {
              if (!is_end(t)) throw Reject{"`0` but " + k.session + "[" + k.role + "] still expects " + print_utype(t)};
            }
            line(depth, "inact");
          } else if constexpr (std::is_same_v<T, PSelect>) {
            SessionRole at{n.session, n.from};
            auto it = env.find(at);
            if (it == env.end()) throw Reject{"no type for " + n.session + "[" + n.from + "]"};
            UType t = head(it->second);
            auto* sel = std::get_if<USelect>(&t.node().v);
            if (!sel || sel->partner != n.to) {
              throw Reject{"selection on " + print_chan(n.session, n.from, n.to) + " against " + print_utype(t)};
            }
            line(depth, "select " + print_chan(n.session, n.from, n.to) + " : " + print_utype(t));
            for (const auto& b : n.branches) {
              const UChoice* c = find(sel->branches, b.label);
              if (!c) throw Reject{"label `" + b.label + "` not offered by " + print_utype(t)};
              infer_sort(b.guard, scope, {});
              auto ps = infer_sort(b.payload, scope, {});
              if (ps != ExprSort::Any && ps != coarse(c->sort)) {
                throw Reject{"payload `" + print_expr(b.payload) + "` does not have sort " + to_string(c->sort)};
              }
              auto inner = env;
              inner[at] = c->cont;
              auto sc = scope;
              sc[b.var] = coarse(c->sort);
              line(depth + 1, "branch " + b.label);
              check(b.cont, inner, sc, recs, depth + 2);
            }
          } else if constexpr (std::is_same_v<T, PBranch>) {
            SessionRole at{n.session, n.to};
            auto it = env.find(at);
            if (it == env.end()) throw Reject{"no type for " + n.session + "[" + n.to + "]"};
            UType t = head(it->second);
            auto* br = std::get_if<UBranch>(&t.node().v);
            if (!br || br->partner != n.from) {
              throw Reject{"branching on " + print_chan(n.session, n.from, n.to) + " against " + print_utype(t)};
            }
            if (br->branches.size() != n.branches.size()) throw Reject{"branch labels differ from " + print_utype(t)};
            line(depth, "branch " + print_chan(n.session, n.from, n.to) + " : " + print_utype(t));
            for (const auto& b : n.branches) {
              const UChoice* c = find(br->branches, b.label);
              if (!c) throw Reject{"label `" + b.label + "` not expected by " + print_utype(t)};
              if (b.sort && coarse(*b.sort) != coarse(c->sort)) {
                throw Reject{"input `" + b.var + "` declared " + to_string(*b.sort) + " but typed " + to_string(c->sort)};
              }
              auto inner = env;
              inner[at] = c->cont;
              auto sc = scope;
              sc[b.var] = coarse(c->sort);
              line(depth + 1, "case " + b.label);
              check(b.cont, inner, sc, recs, depth + 2);
            }
          } else if constexpr (std::is_same_v<T, PPar>) {
            auto [l, r] = split_env(env, n.left, n.right);
            line(depth, "par");
            check(n.left, l, scope, recs, depth + 1);
            check(n.right, r, scope, recs, depth + 1);
          } else if constexpr (std::is_same_v<T, PRequest> || std::is_same_v<T, PAccept>) {
            auto g = gamma_.find(n.shared);
            if (g == gamma_.end()) throw Reject{"shared name `" + n.shared + "` not in the shared environment"};
            auto role = g->second.find(n.role);
            if (role == g->second.end()) throw Reject{"`" + n.shared + "` has no role `" + n.role + "`"};
            auto inner = env;
            inner[{n.var, n.role}] = erase(role->second);
            line(depth, "join " + n.shared + "[" + n.role + "] as " + n.var);
            check(n.body, inner, scope, recs, depth + 1);
          } else if constexpr (std::is_same_v<T, PRecDef>) {
            std::optional<SessionRole> at;
            std::string tv;
            for (const auto& [k, t] : env) {
              if (auto* r = std::get_if<URec>(&t.node().v)) {
                if (at) throw Reject{"recursion `" + n.name + "` spans several recursive types"};
                at = k;
                tv = r->name;
                tvars_[r->name] = r->body;
              } else if (!is_end(t)) {
                throw Reject{"recursion `" + n.name + "` against non-recursive " + print_utype(t)};
              }
            }
            if (!at) throw Reject{"recursion `" + n.name + "` without a recursive type"};
            auto inner = env;
            inner[*at] = tvars_[tv];
            recs[n.name] = {*at, tv};
            auto sc = scope;
            sc[n.param] = ExprSort::Any;
            line(depth, "rec " + n.name + " : mu " + tv);
            check(n.body, inner, sc, recs, depth + 1);
          } else if constexpr (std::is_same_v<T, PRecCall>) {
            auto it = recs.find(n.name);
            if (it == recs.end()) throw Reject{"unbound process variable `" + n.name + "`"};
            for (const auto& [k, t] : env) {
              if (k == it->second.at) {
                auto* c = std::get_if<UCall>(&t.node().v);
                if (!c || c->name != it->second.type_var) {
                  throw Reject{"call `" + n.name + "` where " + print_utype(t) + " is expected"};
                }
              } else if (!is_end(t)) {
                throw Reject{"call `" + n.name + "` leaves " + print_utype(t) + " unfinished"};
              }
            }
            line(depth, "call " + n.name);
          } else {
            check(n.cont, env, scope, recs, depth);
          }
        },
        p.node().v);
  }

 private:
  static const UChoice* find(const std::vector<UChoice>& bs, const std::string& label) {
    for (const auto& b : bs)
      if (b.label == label) return &b;
    return nullptr;
  }

  const SharedEnv& gamma_;
  std::map<std::string, UType> tvars_;
  std::ostringstream out_;
};

}  // namespace detail

/// `Gamma |- P |> Delta` for unasserted types.
inline TypingResult typecheck_unasserted(const Process& p, const USessionEnv& delta, const SharedEnv& gamma = {}) {
  detail::UnassertedChecker ck(gamma);
  TypingResult r;
  try {
    ck.check(p, delta, {}, {}, 0);
  } catch (const detail::Reject& e) {
    r.ok = false;
    r.reason = e.reason;
  } catch (const Error& e) {
    r.ok = false;
    r.reason = e.what();
  }
  r.derivation = ck.derivation();
  return r;
}

// ---------------------------------------------------------------------------
// Asserted proof checking

struct ProveOptions {
  int sort_bound = kDefaultSortBound;
  std::size_t validity_cap = kDefaultValidityCap;
};

namespace detail {

/// Proof search for `C; Gamma |- P |> Delta` by symbolic execution. The
/// state is a map from state variables to expressions over symbols `$x`
/// standing for the initial values; every obligation is a bounded validity
/// check over those symbols and the fresh value symbols introduced at each
/// communication.
class Prover {
 public:
  Prover(const SharedEnv& gamma, std::map<std::string, Domain> state_domains, ProveOptions opts)
      : gamma_(gamma), state_domains_(std::move(state_domains)), opts_(opts) {}

  struct Sym {
    Expr hyp;
    ExprSubst state;  // @x -> symbolic value
    ExprSubst pvars;  // process variables
    ExprSubst avars;  // assertion variables
  };

  struct RecInfo {
    SessionRole at;
    LRec rec;
  };

  std::string derivation() const { return out_.str(); }

  Sym initial(const Expr& precondition) {
    Sym s;
    for (const auto& [x, d] : state_domains_) {
      std::string sym = "$" + x;
      ctx_.vars[sym] = d;
      s.state[x] = Expr::var(sym);
    }
    s.hyp = subst_state(precondition, s.state);
    return s;
  }

  void prove(const Process& p, SessionEnv env, Sym sym, std::map<std::string, RecInfo> recs, int depth) {
    std::visit([&](const auto& n) { on(n, env, sym, recs, depth); }, p.node().v);
  }

 private:
  void line(int depth, const std::string& s) { out_ << std::string(2 * depth, ' ') << s << "\n"; }

  std::string fresh(const Domain& d) {
    std::string v = "$v" + std::to_string(++fresh_);
    ctx_.vars[v] = d;
    return v;
  }

  Expr in_state(const Expr& e, const ExprSubst& vars, const Sym& s) const {
    return subst_state(subst_vars(e, vars), s.state);
  }

  void obligation(const Expr& hyp, const Expr& concl, const std::string& what, int depth) {
    auto v = valid_bounded(hyp, concl, ctx_, opts_.validity_cap);
    if (!v.valid) {
      throw Reject{what + ": `" + print_expr(concl) + "` not implied, counterexample " + print_binding(*v.witness)};
    }
    line(depth, "valid " + what);
  }

  // Post-state of `u` with its variables read through `vars`.
  ExprSubst post(const Update& u, const ExprSubst& vars, const Sym& s) const {
    ExprSubst out = s.state;
    for (const auto& a : u.assignments) {
      if (!s.state.count(a.var)) throw Reject{"update of undeclared state variable `@" + a.var + "`"};
      out[a.var] = in_state(a.rhs, vars, s);
    }
    return out;
  }

  // A step of the process and of the assertion: the assertion's update
  // modality only constrains runs where both post-states agree.
  Sym advance(Sym s, const Update& pu, const Update& au, const std::string& pvar, const std::string& avar,
              const Expr& value) {
    s.pvars[pvar] = value;
    s.avars[avar] = value;
    auto pp = post(pu, s.pvars, s);
    auto pa = post(au, s.avars, s);
    for (const auto& [x, e] : pp) {
      if (!(e == pa.at(x))) s.hyp = conj(s.hyp, eq(e, pa.at(x)));
    }
    s.state = pp;
    return s;
  }

  const LocalAssertion& entry(SessionEnv& env, const SessionRole& at) {
    auto it = env.find(at);
    if (it == env.end()) throw Reject{"no assertion for " + at.session + "[" + at.role + "]"};
    return it->second;
  }

  static const AssertionBranch* find(const std::vector<AssertionBranch>& bs, const std::string& label) {
    for (const auto& b : bs)
      if (b.label == label) return &b;
    return nullptr;
  }

  void on(const PInact&, SessionEnv& env, Sym&, std::map<std::string, RecInfo>&, int depth) {
    for (const auto& [k, l] : env) {
      if (!is_end(l)) throw Reject{"`0` but " + k.session + "[" + k.role + "] still expects " + print_assertion(l)};
    }
    line(depth, "end");
  }

  // Selection: the guards partition the states allowed by the hypothesis;
  // each enabled branch sends a value satisfying the assertion's predicate.
  void on(const PSelect& n, SessionEnv& env, Sym& s, std::map<std::string, RecInfo>& recs, int depth) {
    SessionRole at{n.session, n.from};
    auto* sel = std::get_if<LSelect>(&entry(env, at).node().v);
    if (!sel || sel->partner != n.to) throw Reject{"selection on " + print_chan(n.session, n.from, n.to) + " mistyped"};
    line(depth, "select " + print_chan(n.session, n.from, n.to));
    std::vector<Expr> guards;
    for (const auto& b : n.branches) guards.push_back(in_state(b.guard, s.pvars, s));
    Expr some = guards.front();
    for (std::size_t i = 1; i < guards.size(); ++i) some = some || guards[i];
    obligation(s.hyp, some, "guards exhaustive", depth + 1);
    for (std::size_t i = 0; i < guards.size(); ++i) {
      for (std::size_t j = i + 1; j < guards.size(); ++j) {
        obligation(s.hyp, !(guards[i] && guards[j]), "guards " + n.branches[i].label + ", " + n.branches[j].label + " exclusive",
                   depth + 1);
      }
    }
    for (std::size_t i = 0; i < n.branches.size(); ++i) {
      const auto& b = n.branches[i];
      const AssertionBranch* ab = find(sel->branches, b.label);
      if (!ab) throw Reject{"label `" + b.label + "` not in the assertion"};
      std::string v = fresh(domain_of(ab->sort, opts_.sort_bound));
      Sym t = s;
      t.hyp = conj(conj(s.hyp, guards[i]), eq(Expr::var(v), in_state(b.payload, s.pvars, s)));
      auto avars = t.avars;
      avars[ab->var] = Expr::var(v);
      line(depth + 1, "send " + b.label + " as " + v);
      obligation(t.hyp, in_state(ab->pred, avars, t), "predicate of " + b.label, depth + 2);
      Sym next = advance(t, b.update, ab->update, b.var, ab->var, Expr::var(v));
      auto inner = env;
      inner[at] = ab->cont;
      prove(b.cont, inner, next, recs, depth + 2);
    }
  }

  // Branching: the predicate of each branch becomes a hypothesis for the
  // received value.
  void on(const PBranch& n, SessionEnv& env, Sym& s, std::map<std::string, RecInfo>& recs, int depth) {
    SessionRole at{n.session, n.to};
    auto* br = std::get_if<LBranch>(&entry(env, at).node().v);
    if (!br || br->partner != n.from) throw Reject{"branching on " + print_chan(n.session, n.from, n.to) + " mistyped"};
    line(depth, "branch " + print_chan(n.session, n.from, n.to));
    for (const auto& b : n.branches) {
      const AssertionBranch* ab = find(br->branches, b.label);
      if (!ab) throw Reject{"label `" + b.label + "` not in the assertion"};
      Domain da = domain_of(ab->sort, opts_.sort_bound);
      Domain dp = domain_of(b.sort.value_or(Sort::Int), opts_.sort_bound);
      if (da.boolean != dp.boolean) throw Reject{"input `" + b.var + "` has the wrong sort"};
      Domain d = da.boolean ? da : Domain::range(std::max(da.lo, dp.lo), std::min(da.hi, dp.hi));
      if (d.size() == 0) {
        line(depth + 1, "receive " + b.label + ": no value in both domains");
        continue;
      }
      std::string v = fresh(d);
      Sym t = s;
      auto avars = t.avars;
      avars[ab->var] = Expr::var(v);
      t.hyp = conj(s.hyp, in_state(ab->pred, avars, t));
      line(depth + 1, "receive " + b.label + " as " + v + " assuming " + print_expr(ab->pred));
      Sym next = advance(t, b.update, ab->update, b.var, ab->var, Expr::var(v));
      auto inner = env;
      inner[at] = ab->cont;
      prove(b.cont, inner, next, recs, depth + 2);
    }
  }

  // Parallel: sessions are split by use; the two sides may not touch each
  // other's state, so either side's reasoning survives the other's steps.
  void on(const PPar& n, SessionEnv& env, Sym& s, std::map<std::string, RecInfo>& recs, int depth) {
    auto [l, r] = split_env(env, n.left, n.right);
    auto [lr, lw] = state_footprint(n.left);
    auto [rr, rw] = state_footprint(n.right);
    for (const auto& [k, a] : l) lr.merge(state_vars(a));
    for (const auto& [k, a] : r) rr.merge(state_vars(a));
    auto clash = [](const std::set<std::string>& w, const std::set<std::string>& other) {
      for (const auto& x : w)
        if (other.count(x)) return x;
      return std::string();
    };
    std::string c = clash(lw, rr);
    if (c.empty()) c = clash(rw, lr);
    if (c.empty()) c = clash(lw, rw);
    if (!c.empty()) throw Reject{"both sides of a parallel composition use state variable `@" + c + "`"};
    line(depth, "par");
    prove(n.left, l, s, recs, depth + 1);
    prove(n.right, r, s, recs, depth + 1);
  }

  void on(const PRequest& n, SessionEnv& env, Sym& s, std::map<std::string, RecInfo>& recs, int depth) {
    join(n.shared, n.role, n.var, n.body, env, s, recs, depth);
  }
  void on(const PAccept& n, SessionEnv& env, Sym& s, std::map<std::string, RecInfo>& recs, int depth) {
    join(n.shared, n.role, n.var, n.body, env, s, recs, depth);
  }
  void join(const std::string& shared, const std::string& role, const std::string& var, const Process& body,
            SessionEnv& env, Sym& s, std::map<std::string, RecInfo>& recs, int depth) {
    auto g = gamma_.find(shared);
    if (g == gamma_.end() || !g->second.count(role)) throw Reject{"no assertion for " + shared + "[" + role + "]"};
    auto inner = env;
    inner[{var, role}] = g->second.at(role);
    line(depth, "join " + shared + "[" + role + "] as " + var);
    prove(body, inner, s, recs, depth + 1);
  }

  // Recursion: the initialisation predicate and the invariant hold for the
  // initial argument; the body is proved from the invariant alone, for any
  // state, and every call re-establishes both.
  void on(const PRecDef& n, SessionEnv& env, Sym& s, std::map<std::string, RecInfo>& recs, int depth) {
    std::optional<SessionRole> at;
    const LRec* rec = nullptr;
    for (const auto& [k, l] : env) {
      if (auto* r = std::get_if<LRec>(&l.node().v)) {
        if (at) throw Reject{"recursion `" + n.name + "` spans several recursive assertions"};
        at = k;
        rec = r;
      } else if (!is_end(l)) {
        throw Reject{"recursion `" + n.name + "` against a non-recursive assertion"};
      }
    }
    if (!rec) throw Reject{"recursion `" + n.name + "` without a recursive assertion"};
    line(depth, "rec " + n.name + " : mu " + rec->name);
    Expr init = in_state(n.init, s.pvars, s);
    obligation(s.hyp, in_state(rec->init_pred, {{rec->init_var, init}}, s), "initialisation of " + rec->name, depth + 1);
    obligation(s.hyp, in_state(rec->invariant, {{rec->param, init}}, s), "invariant of " + rec->name + " on entry",
               depth + 1);
    Sym body;
    for (const auto& [x, d] : state_domains_) {
      std::string sym = fresh(d);
      body.state[x] = Expr::var(sym);
    }
    std::string w = fresh(domain_of(rec->sort, opts_.sort_bound));
    body.pvars[n.param] = Expr::var(w);
    body.avars[rec->param] = Expr::var(w);
    body.hyp = in_state(rec->invariant, body.avars, body);
    recs[n.name] = {*at, *rec};
    auto inner = env;
    inner[*at] = rec->body;
    prove(n.body, inner, body, recs, depth + 1);
  }

  void on(const PRecCall& n, SessionEnv& env, Sym& s, std::map<std::string, RecInfo>& recs, int depth) {
    auto it = recs.find(n.name);
    if (it == recs.end()) throw Reject{"unbound process variable `" + n.name + "`"};
    const auto& rec = it->second.rec;
    for (const auto& [k, l] : env) {
      if (k == it->second.at) {
        auto* c = std::get_if<LCall>(&l.node().v);
        if (!c || c->name != rec.name) throw Reject{"call `" + n.name + "` where " + print_assertion(l) + " is expected"};
        Expr arg = in_state(n.arg, s.pvars, s);
        line(depth, "call " + n.name);
        ExprSubst avars = s.avars;
        avars[c->arg_var] = arg;
        obligation(s.hyp, in_state(c->arg_pred, avars, s), "argument predicate of " + rec.name, depth + 1);
        obligation(s.hyp, in_state(rec.invariant, {{rec.param, arg}}, s), "invariant of " + rec.name + " at call",
                   depth + 1);
      } else if (!is_end(l)) {
        throw Reject{"call `" + n.name + "` leaves " + print_assertion(l) + " unfinished"};
      }
    }
  }

  void on(const PPending& n, SessionEnv& env, Sym& s, std::map<std::string, RecInfo>& recs, int depth) {
    Sym next = s;
    next.state = post(n.update, s.pvars, s);
    prove(n.cont, env, next, recs, depth);
  }

  const SharedEnv& gamma_;
  std::map<std::string, Domain> state_domains_;
  ProveOptions opts_;
  SortContext ctx_;
  int fresh_ = 0;
  std::ostringstream out_;
};

}  // namespace detail

/// `C; Gamma |- P |> Delta`. `state_domains` gives the range of every state
/// variable the precondition, assertions or process mention.
inline TypingResult prove_asserted(const Expr& precondition, const SharedEnv& gamma, const SessionEnv& delta,
                                   const Process& p, const std::map<std::string, Domain>& state_domains,
                                   const ProveOptions& opts = {}) {
  TypingResult pre = typecheck_unasserted(p, erase_env(delta), gamma);
  if (!pre.ok) {
    pre.reason = "not well typed: " + pre.reason;
    return pre;
  }
  detail::Prover prover(gamma, state_domains, opts);
  TypingResult r;
  try {
    prover.prove(p, delta, prover.initial(precondition), {}, 0);
  } catch (const detail::Reject& e) {
    r.ok = false;
    r.reason = e.reason;
  }
  r.derivation = prover.derivation();
  return r;
}

}  // namespace mpsa
