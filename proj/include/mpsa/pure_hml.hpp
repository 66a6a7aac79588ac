#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mpsa/satisfaction.hpp"

namespace mpsa {

// ---------------------------------------------------------------------------
// Processes of the value-passing pi-calculus

/// A channel: a session endpoint pair, a store cell `a_x`, or the update
/// port `x` of a store variable. `skip` is an update port with no store.
struct PiChan {
  enum class Kind { Session, Cell, Update };
  Kind kind = Kind::Session;
  std::string name;
  std::string from, to;

  static PiChan session(std::string s, std::string p, std::string q) {
    return {Kind::Session, std::move(s), std::move(p), std::move(q)};
  }
  static PiChan cell(std::string x) { return {Kind::Cell, std::move(x), {}, {}}; }
  static PiChan update(std::string x) { return {Kind::Update, std::move(x), {}, {}}; }

  std::string print() const {
    switch (kind) {
      case Kind::Session: return print_chan(name, from, to);
      case Kind::Cell: return "a_" + name;
      case Kind::Update: return name;
    }
    return name;
  }
  bool operator==(const PiChan&) const = default;
};

inline constexpr const char* kSkipPort = "skip";

struct PiNode;

class PiProcess {
 public:
  PiProcess();  // inert
  explicit PiProcess(PiNode n);
  const PiNode& node() const { return *p_; }

 private:
  std::shared_ptr<const PiNode> p_;
};

struct PiNil {};

/// One alternative of an output. `rebind`, when present, makes the value the
/// evaluation of a received expression with state variables read from the
/// given capture variables: `eval(e[y/x])`.
struct PiOutBranch {
  Expr guard = Expr::boolean(true);
  std::optional<std::string> label;
  Expr value;
  std::vector<std::pair<std::string, std::string>> rebind;  // state variable, capture
  PiProcess cont;
};

struct PiOut {
  PiChan chan;
  std::vector<PiOutBranch> branches;
};

struct PiInBranch {
  std::optional<std::string> label;
  std::string var;
  std::optional<Sort> sort;
  PiProcess cont;
};

struct PiIn {
  PiChan chan;
  std::vector<PiInBranch> branches;
};

struct PiPar {
  PiProcess left, right;
};

struct PiRepl {
  PiProcess body;
};

struct PiRec {
  std::string name, param;
  Expr init;
  PiProcess body;
};

struct PiCall {
  std::string name;
  Expr arg;
};

struct PiJoin {
  bool request = false;
  std::string shared, role, var;
  PiProcess body;
};

struct PiNode {
  std::variant<PiNil, PiOut, PiIn, PiPar, PiRepl, PiRec, PiCall, PiJoin> v;
};

inline PiProcess::PiProcess() : p_(std::make_shared<const PiNode>(PiNode{PiNil{}})) {}
inline PiProcess::PiProcess(PiNode n) : p_(std::make_shared<const PiNode>(std::move(n))) {}

namespace pi {
inline PiProcess nil() { return {}; }
inline PiProcess out(PiChan c, Expr v, PiProcess k = {}) {
  return PiProcess(PiNode{PiOut{std::move(c), {PiOutBranch{Expr::boolean(true), std::nullopt, std::move(v), {}, std::move(k)}}}});
}
inline PiProcess out(PiChan c, std::vector<PiOutBranch> bs) { return PiProcess(PiNode{PiOut{std::move(c), std::move(bs)}}); }
inline PiProcess in(PiChan c, std::string var, PiProcess k = {}) {
  return PiProcess(PiNode{PiIn{std::move(c), {PiInBranch{std::nullopt, std::move(var), std::nullopt, std::move(k)}}}});
}
inline PiProcess in(PiChan c, std::vector<PiInBranch> bs) { return PiProcess(PiNode{PiIn{std::move(c), std::move(bs)}}); }
inline PiProcess par(PiProcess l, PiProcess r) {
  if (std::holds_alternative<PiNil>(l.node().v)) return r;
  if (std::holds_alternative<PiNil>(r.node().v)) return l;
  return PiProcess(PiNode{PiPar{std::move(l), std::move(r)}});
}
inline PiProcess repl(PiProcess b) { return PiProcess(PiNode{PiRepl{std::move(b)}}); }
inline PiProcess rec(std::string n, std::string x, Expr init, PiProcess b) {
  return PiProcess(PiNode{PiRec{std::move(n), std::move(x), std::move(init), std::move(b)}});
}
inline PiProcess call(std::string n, Expr arg) { return PiProcess(PiNode{PiCall{std::move(n), std::move(arg)}}); }
inline PiProcess join(bool request, std::string a, std::string role, std::string var, PiProcess b) {
  return PiProcess(PiNode{PiJoin{request, std::move(a), std::move(role), std::move(var), std::move(b)}});
}
inline PiProcess par_all(const std::vector<PiProcess>& ps) {
  PiProcess acc;
  for (const auto& p : ps) acc = par(acc, p);
  return acc;
}
}  // namespace pi

inline bool is_nil(const PiProcess& p) { return std::holds_alternative<PiNil>(p.node().v); }

namespace detail {

inline void print_pi_to(std::ostringstream& os, const PiProcess& p);

inline void print_pi_cont(std::ostringstream& os, const PiProcess& p) {
  if (std::holds_alternative<PiPar>(p.node().v)) {
    os << "(";
    print_pi_to(os, p);
    os << ")";
  } else {
    print_pi_to(os, p);
  }
}

inline std::string print_rebind(const std::string& e, const std::vector<std::pair<std::string, std::string>>& rb) {
  std::string ys, xs;
  for (const auto& [x, y] : rb) {
    ys += (ys.empty() ? "" : ",") + y;
    xs += (xs.empty() ? "" : ",") + x;
  }
  return "eval(" + e + "[" + ys + "/" + xs + "])";
}

inline void print_pi_to(std::ostringstream& os, const PiProcess& p) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PiNil>) {
          os << "0";
        } else if constexpr (std::is_same_v<T, PiOut>) {
          if (n.chan.kind == PiChan::Kind::Session) {
            os << n.chan.print() << "!{ ";
            for (std::size_t i = 0; i < n.branches.size(); ++i) {
              const auto& b = n.branches[i];
              if (i) os << "; ";
              os << print_expr(b.guard) << " :: " << b.label.value_or("") << "<" << print_expr_bracketed(b.value)
                 << ">. ";
              print_pi_cont(os, b.cont);
            }
            os << " }";
            return;
          }
          const auto& b = n.branches.front();
          std::string v = b.rebind.empty() ? print_expr_bracketed(b.value) : print_rebind(print_expr(b.value), b.rebind);
          os << "~" << n.chan.print() << "<" << v << ">";
          if (!is_nil(b.cont)) {
            os << ".";
            print_pi_cont(os, b.cont);
          }
        } else if constexpr (std::is_same_v<T, PiIn>) {
          if (n.chan.kind == PiChan::Kind::Session) {
            os << n.chan.print() << "?{ ";
            for (std::size_t i = 0; i < n.branches.size(); ++i) {
              const auto& b = n.branches[i];
              if (i) os << "; ";
              os << b.label.value_or("") << "(" << b.var;
              if (b.sort) os << ":" << to_string(*b.sort);
              os << "). ";
              print_pi_cont(os, b.cont);
            }
            os << " }";
            return;
          }
          const auto& b = n.branches.front();
          os << n.chan.print() << "(" << b.var << ")";
          if (!is_nil(b.cont)) {
            os << ".";
            print_pi_cont(os, b.cont);
          }
        } else if constexpr (std::is_same_v<T, PiPar>) {
          print_pi_to(os, n.left);
          os << " | ";
          print_pi_cont(os, n.right);
        } else if constexpr (std::is_same_v<T, PiRepl>) {
          os << "!";
          print_pi_cont(os, n.body);
        } else if constexpr (std::is_same_v<T, PiRec>) {
          os << "mu " << n.name << "(" << n.param << " := " << print_expr(n.init) << "). ";
          print_pi_cont(os, n.body);
        } else if constexpr (std::is_same_v<T, PiCall>) {
          os << n.name << "<" << print_expr_bracketed(n.arg) << ">";
        } else {
          os << (n.request ? "req " : "acc ") << n.shared << "[" << n.role << "](" << n.var << "). ";
          print_pi_cont(os, n.body);
        }
      },
      p.node().v);
}

}  // namespace detail

inline std::string print_pi(const PiProcess& p) {
  std::ostringstream os;
  detail::print_pi_to(os, p);
  return os.str();
}

// -- substitution and renaming -----------------------------------------------

inline PiProcess subst_pi(const PiProcess& p, const ExprSubst& s) {
  if (s.empty()) return p;
  auto without = [&](const std::string& x) {
    ExprSubst t = s;
    t.erase(x);
    return t;
  };
  return std::visit(
      [&](const auto& n) -> PiProcess {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PiNil>) {
          return p;
        } else if constexpr (std::is_same_v<T, PiOut>) {
          PiOut o = n;
          for (auto& b : o.branches) {
            b.guard = subst_vars(b.guard, s);
            b.value = subst_vars(b.value, s);
            // A received expression reads the store through the captures.
            if (!b.rebind.empty() && !std::holds_alternative<EVar>(b.value.node().v)) {
              ExprSubst st;
              for (const auto& [x, y] : b.rebind) st[x] = Expr::var(y);
              b.value = subst_vars(subst_state(b.value, st), s);
              b.rebind.clear();
            }
            b.cont = subst_pi(b.cont, s);
          }
          return PiProcess(PiNode{o});
        } else if constexpr (std::is_same_v<T, PiIn>) {
          PiIn i = n;
          for (auto& b : i.branches) b.cont = subst_pi(b.cont, without(b.var));
          return PiProcess(PiNode{i});
        } else if constexpr (std::is_same_v<T, PiPar>) {
          return pi::par(subst_pi(n.left, s), subst_pi(n.right, s));
        } else if constexpr (std::is_same_v<T, PiRepl>) {
          return pi::repl(subst_pi(n.body, s));
        } else if constexpr (std::is_same_v<T, PiRec>) {
          return pi::rec(n.name, n.param, subst_vars(n.init, s), subst_pi(n.body, without(n.param)));
        } else if constexpr (std::is_same_v<T, PiCall>) {
          return pi::call(n.name, subst_vars(n.arg, s));
        } else {
          return pi::join(n.request, n.shared, n.role, n.var, subst_pi(n.body, s));
        }
      },
      p.node().v);
}

inline PiProcess rename_sessions(const PiProcess& p, const NameMap& m) {
  return std::visit(
      [&](const auto& n) -> PiProcess {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PiNil> || std::is_same_v<T, PiCall>) {
          return p;
        } else if constexpr (std::is_same_v<T, PiOut> || std::is_same_v<T, PiIn>) {
          T o = n;
          if (o.chan.kind == PiChan::Kind::Session) o.chan.name = rename(o.chan.name, m);
          for (auto& b : o.branches) b.cont = rename_sessions(b.cont, m);
          return PiProcess(PiNode{o});
        } else if constexpr (std::is_same_v<T, PiPar>) {
          return pi::par(rename_sessions(n.left, m), rename_sessions(n.right, m));
        } else if constexpr (std::is_same_v<T, PiRepl>) {
          return pi::repl(rename_sessions(n.body, m));
        } else if constexpr (std::is_same_v<T, PiRec>) {
          return pi::rec(n.name, n.param, n.init, rename_sessions(n.body, m));
        } else {
          NameMap inner = m;
          inner.erase(n.var);
          return pi::join(n.request, rename(n.shared, m), n.role, n.var, rename_sessions(n.body, inner));
        }
      },
      p.node().v);
}

inline PiProcess replace_pi_calls(const PiProcess& p, const std::string& name,
                                  const std::function<PiProcess(const Expr&)>& by) {
  return std::visit(
      [&](const auto& n) -> PiProcess {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PiNil>) {
          return p;
        } else if constexpr (std::is_same_v<T, PiOut> || std::is_same_v<T, PiIn>) {
          T o = n;
          for (auto& b : o.branches) b.cont = replace_pi_calls(b.cont, name, by);
          return PiProcess(PiNode{o});
        } else if constexpr (std::is_same_v<T, PiPar>) {
          return pi::par(replace_pi_calls(n.left, name, by), replace_pi_calls(n.right, name, by));
        } else if constexpr (std::is_same_v<T, PiRepl>) {
          return pi::repl(replace_pi_calls(n.body, name, by));
        } else if constexpr (std::is_same_v<T, PiRec>) {
          if (n.name == name) return p;
          return pi::rec(n.name, n.param, n.init, replace_pi_calls(n.body, name, by));
        } else if constexpr (std::is_same_v<T, PiCall>) {
          return n.name == name ? by(n.arg) : p;
        } else {
          return pi::join(n.request, n.shared, n.role, n.var, replace_pi_calls(n.body, name, by));
        }
      },
      p.node().v);
}

inline void collect_pi_names(const PiProcess& p, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PiOut> || std::is_same_v<T, PiIn>) {
          out.insert(n.chan.name);
          for (const auto& b : n.branches) collect_pi_names(b.cont, out);
        } else if constexpr (std::is_same_v<T, PiPar>) {
          collect_pi_names(n.left, out);
          collect_pi_names(n.right, out);
        } else if constexpr (std::is_same_v<T, PiRepl> || std::is_same_v<T, PiRec> || std::is_same_v<T, PiJoin>) {
          if constexpr (std::is_same_v<T, PiJoin>) {
            out.insert(n.shared);
            out.insert(n.var);
          }
          collect_pi_names(n.body, out);
        }
      },
      p.node().v);
}

// ---------------------------------------------------------------------------
// Encodings

/// `a_1<v_1> | ... | a_n<v_n> | !x_1(e).a_1(y_1)...a_n(y_n).(...) | ...`,
/// captures in ascending variable order.
inline PiProcess encode_store(const VirtualState& s) {
  std::vector<PiProcess> parts;
  for (const auto& [x, v] : s) parts.push_back(pi::out(PiChan::cell(x), Expr::lit(v)));
  std::vector<std::string> vars;
  std::vector<std::string> ys;
  for (const auto& [x, v] : s) vars.push_back(x);
  for (std::size_t k = 0; k < vars.size(); ++k) ys.push_back(vars.size() == 1 ? "y" : "y" + std::to_string(k + 1));
  std::vector<std::pair<std::string, std::string>> rebind;
  for (std::size_t k = 0; k < vars.size(); ++k) rebind.push_back({vars[k], ys[k]});
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::vector<PiProcess> emits;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      if (k == i) {
        PiOutBranch b{Expr::boolean(true), std::nullopt, Expr::var("e"), rebind, {}};
        emits.push_back(pi::out(PiChan::cell(vars[k]), std::vector<PiOutBranch>{b}));
      } else {
        emits.push_back(pi::out(PiChan::cell(vars[k]), Expr::var(ys[k])));
      }
    }
    PiProcess body = pi::par_all(emits);
    for (std::size_t k = vars.size(); k-- > 0;) body = pi::in(PiChan::cell(vars[k]), ys[k], body);
    parts.push_back(pi::repl(pi::in(PiChan::update(vars[i]), "e", body)));
  }
  return pi::par_all(parts);
}

namespace detail {

// Assignments in ascending variable order, one store message each. A later
// right-hand side may not read a variable written before it.
inline std::vector<Assignment> sequential(const Update& u) {
  auto as = u.assignments;
  std::sort(as.begin(), as.end(), [](const Assignment& a, const Assignment& b) { return a.var < b.var; });
  std::set<std::string> written;
  for (const auto& a : as) {
    for (const auto& x : state_vars(a.rhs)) {
      if (written.count(x)) {
        throw Error("pure_hml.update", "update reads `@" + x + "` after writing it; no sequential encoding");
      }
    }
    written.insert(a.var);
  }
  return as;
}

class ProcessEncoder {
 public:
  explicit ProcessEncoder(std::set<std::string> avoid) : avoid_(std::move(avoid)) {}

  PiProcess run(const Process& p) {
    return std::visit([&](const auto& n) { return on(n); }, p.node().v);
  }

 private:
  std::string fresh() {
    std::string v = fresh_name("c", avoid_);
    avoid_.insert(v);
    return v;
  }

  // Reads the cells of `vars` (restoring each at once) before `body`.
  PiProcess reads(const std::set<std::string>& vars, const std::function<PiProcess(const ExprSubst&)>& body) {
    ExprSubst m;
    std::vector<std::pair<std::string, std::string>> caps;
    for (const auto& x : vars) {
      std::string c = fresh();
      m[x] = Expr::var(c);
      caps.push_back({x, c});
    }
    PiProcess out = body(m);
    for (auto it = caps.rbegin(); it != caps.rend(); ++it) {
      out = pi::in(PiChan::cell(it->first), it->second, pi::par(pi::out(PiChan::cell(it->first), Expr::var(it->second)), out));
    }
    return out;
  }

  PiProcess on(const PInact&) { return {}; }

  PiProcess on(const PSelect& n) {
    std::set<std::string> vars;
    for (const auto& b : n.branches) {
      vars.merge(state_vars(b.guard));
      vars.merge(state_vars(b.payload));
    }
    return reads(vars, [&](const ExprSubst& m) {
      std::vector<PiOutBranch> bs;
      for (const auto& b : n.branches) {
        Expr v = subst_state(b.payload, m);
        Process k = subst_process(proc::pending(b.update, b.cont), {{b.var, v}});
        bs.push_back(PiOutBranch{subst_state(b.guard, m), b.label, v, {}, run(k)});
      }
      return pi::out(PiChan::session(n.session, n.from, n.to), bs);
    });
  }

  PiProcess on(const PBranch& n) {
    std::vector<PiInBranch> bs;
    for (const auto& b : n.branches) bs.push_back(PiInBranch{b.label, b.var, b.sort, run(proc::pending(b.update, b.cont))});
    return pi::in(PiChan::session(n.session, n.from, n.to), bs);
  }

  PiProcess on(const PPending& n) {
    PiProcess k = run(n.cont);
    if (n.update.is_skip()) return pi::out(PiChan::update(kSkipPort), Expr::integer(0), k);
    auto as = sequential(n.update);
    for (auto it = as.rbegin(); it != as.rend(); ++it) k = pi::out(PiChan::update(it->var), it->rhs, k);
    return k;
  }

  PiProcess on(const PPar& n) { return pi::par(run(n.left), run(n.right)); }

  PiProcess on(const PRecDef& n) {
    PiProcess body = run(n.body);
    return reads(state_vars(n.init), [&](const ExprSubst& m) { return pi::rec(n.name, n.param, subst_state(n.init, m), body); });
  }

  PiProcess on(const PRecCall& n) {
    return reads(state_vars(n.arg), [&](const ExprSubst& m) { return pi::call(n.name, subst_state(n.arg, m)); });
  }

  PiProcess on(const PRequest& n) { return pi::join(true, n.shared, n.role, n.var, run(n.body)); }
  PiProcess on(const PAccept& n) { return pi::join(false, n.shared, n.role, n.var, run(n.body)); }

  std::set<std::string> avoid_;
};

inline void process_vars(const Process& p, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PSelect>) {
          for (const auto& b : n.branches) {
            out.insert(b.var);
            out.merge(free_vars(b.guard));
            out.merge(free_vars(b.payload));
            out.merge(free_vars(b.update));
            process_vars(b.cont, out);
          }
        } else if constexpr (std::is_same_v<T, PBranch>) {
          for (const auto& b : n.branches) {
            out.insert(b.var);
            out.merge(free_vars(b.update));
            process_vars(b.cont, out);
          }
        } else if constexpr (std::is_same_v<T, PPar>) {
          process_vars(n.left, out);
          process_vars(n.right, out);
        } else if constexpr (std::is_same_v<T, PRecDef>) {
          out.insert(n.param);
          out.merge(free_vars(n.init));
          process_vars(n.body, out);
        } else if constexpr (std::is_same_v<T, PRecCall>) {
          out.merge(free_vars(n.arg));
        } else if constexpr (std::is_same_v<T, PPending>) {
          out.merge(free_vars(n.update));
          process_vars(n.cont, out);
        } else if constexpr (std::is_same_v<T, PRequest> || std::is_same_v<T, PAccept>) {
          out.insert(n.var);
          process_vars(n.body, out);
        }
      },
      p.node().v);
}

}  // namespace detail

/// Session actions map to themselves; every state update becomes a message
/// to the store and every state read a capture of the cell, restored at once.
inline PiProcess encode_process(const Process& p) {
  std::set<std::string> avoid;
  detail::process_vars(p, avoid);
  return detail::ProcessEncoder(std::move(avoid)).run(p);
}

/// `[E]phi` becomes `[~x<e>]phi`; a predicate reading `@x` first captures
/// the cell `a_x` into a fresh variable.
inline Formula encode_formula(const Formula& f, const std::set<std::string>& store) {
  std::set<std::string> avoid = all_names(f);
  auto fresh = [&]() {
    std::string v = fresh_name("v", avoid);
    avoid.insert(v);
    return v;
  };
  auto captures = [&](const std::set<std::string>& vars, const std::function<Formula(const ExprSubst&)>& body) {
    ExprSubst m;
    std::vector<std::pair<std::string, std::string>> caps;
    for (const auto& x : vars) {
      if (!store.count(x)) throw Error("pure_hml.store", "state variable `@" + x + "` is not in the store");
      std::string v = fresh();
      m[x] = Expr::var(v);
      caps.push_back({x, v});
    }
    Formula out = body(m);
    for (auto it = caps.rbegin(); it != caps.rend(); ++it) {
      out = fml::must(act::chan_out("a_" + it->first, Expr::var(it->second)), out);
    }
    return out;
  };
  std::function<std::set<std::string>(const Formula&)> hyp_state = [&](const Formula& h) {
    std::set<std::string> out;
    if (auto* p = std::get_if<FPred>(&h.node().v)) return state_vars(p->pred);
    if (auto* c = std::get_if<FAnd>(&h.node().v)) {
      out = hyp_state(c->lhs);
      out.merge(hyp_state(c->rhs));
    }
    if (auto* i = std::get_if<FImplies>(&h.node().v)) {
      out = hyp_state(i->hyp);
      out.merge(hyp_state(i->concl));
    }
    return out;
  };
  std::function<Formula(const Formula&, const ExprSubst&)> hyp_subst = [&](const Formula& h, const ExprSubst& m) {
    if (auto* p = std::get_if<FPred>(&h.node().v)) return fml::pred(subst_state(p->pred, m));
    if (auto* c = std::get_if<FAnd>(&h.node().v)) return fml::conj(hyp_subst(c->lhs, m), hyp_subst(c->rhs, m));
    if (auto* i = std::get_if<FImplies>(&h.node().v)) return fml::implies(hyp_subst(i->hyp, m), hyp_subst(i->concl, m));
    return h;
  };
  std::function<Formula(const Formula&)> go = [&](const Formula& g) -> Formula {
    return std::visit(
        [&](const auto& n) -> Formula {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FTrue> || std::is_same_v<T, FVar>) {
            return g;
          } else if constexpr (std::is_same_v<T, FAnd>) {
            return fml::conj(go(n.lhs), go(n.rhs));
          } else if constexpr (std::is_same_v<T, FPred>) {
            return captures(state_vars(n.pred), [&](const ExprSubst& m) { return fml::pred(subst_state(n.pred, m)); });
          } else if constexpr (std::is_same_v<T, FImplies>) {
            Formula concl = go(n.concl);
            return captures(hyp_state(n.hyp), [&](const ExprSubst& m) { return fml::implies(hyp_subst(n.hyp, m), concl); });
          } else if constexpr (std::is_same_v<T, FMust>) {
            Formula body = go(n.body);
            if (auto* u = std::get_if<UpdateAction>(&n.action.v)) {
              if (u->update.is_skip()) return fml::must(act::chan_out(kSkipPort, Expr::integer(0)), body);
              auto as = detail::sequential(u->update);
              for (const auto& a : as) {
                if (!store.count(a.var)) throw Error("pure_hml.store", "state variable `@" + a.var + "` is not in the store");
              }
              for (auto it = as.rbegin(); it != as.rend(); ++it) body = fml::must(act::chan_out(it->var, it->rhs), body);
              return body;
            }
            std::set<std::string> vars;
            if (auto* c = std::get_if<CommAction>(&n.action.v)) vars = state_vars(c->value);
            return captures(vars, [&](const ExprSubst& m) {
              Action a = n.action;
              if (auto* c = std::get_if<CommAction>(&a.v)) c->value = subst_state(c->value, m);
              return fml::must(a, body);
            });
          } else if constexpr (std::is_same_v<T, FForall>) {
            return fml::forall(n.var, n.sort, go(n.body));
          } else {
            return fml::mu(n.name, go(n.body));
          }
        },
        g.node().v);
  };
  return go(f);
}

// ---------------------------------------------------------------------------
// Interpreter

struct PiOptions {
  int sort_bound = kDefaultSortBound;
  int mu_depth = 8;
  int max_unfold = 64;
  int repl_depth = 4;  // replicated updaters spawned along one path
};

struct PiConfig {
  PiProcess process;
  int replications = 0;
};

struct PiTransition {
  Action action;
  PiConfig target;
  bool cut = false;  // spawned more replicas than the bound allows
};

namespace detail {

inline void flatten_pi(const PiProcess& p, std::vector<PiProcess>& out) {
  if (auto* n = std::get_if<PiPar>(&p.node().v)) {
    flatten_pi(n->left, out);
    flatten_pi(n->right, out);
  } else if (!is_nil(p)) {
    out.push_back(p);
  }
}

inline const PiOut* as_cell(const PiProcess& p) {
  auto* o = std::get_if<PiOut>(&p.node().v);
  return o && o->chan.kind == PiChan::Kind::Cell ? o : nullptr;
}

inline const PiIn* as_updater(const PiProcess& p) {
  auto* r = std::get_if<PiRepl>(&p.node().v);
  if (!r) return nullptr;
  auto* i = std::get_if<PiIn>(&r->body.node().v);
  return i && i->chan.kind == PiChan::Kind::Update ? i : nullptr;
}

/// Cells first, by variable; then updaters; then everything else in order.
inline PiProcess assemble(const std::vector<PiProcess>& ths) {
  std::vector<std::pair<std::string, PiProcess>> cells, updaters;
  std::vector<PiProcess> rest;
  for (const auto& t : ths) {
    if (auto* c = as_cell(t)) {
      cells.push_back({c->chan.name + "|" + print_pi(t), t});
    } else if (auto* u = as_updater(t)) {
      updaters.push_back({u->chan.name + "|" + print_pi(t), t});
    } else {
      rest.push_back(t);
    }
  }
  auto by_key = [](const auto& a, const auto& b) { return a.first < b.first; };
  std::stable_sort(cells.begin(), cells.end(), by_key);
  std::stable_sort(updaters.begin(), updaters.end(), by_key);
  std::vector<PiProcess> all;
  for (auto& [k, t] : cells) all.push_back(t);
  for (auto& [k, t] : updaters) all.push_back(t);
  all.insert(all.end(), rest.begin(), rest.end());
  return pi::par_all(all);
}

class PiStepper {
 public:
  using Emit = std::function<void(Action, std::vector<PiProcess>, bool)>;

  PiStepper(const PiOptions& o, std::set<std::string> avoid) : opts_(o), avoid_(std::move(avoid)) {}

  void act(std::vector<PiProcess> ths, std::size_t i, int unfolds, const Emit& emit) {
    PiProcess t = ths[i];
    std::visit([&](const auto& n) { on(n, ths, i, unfolds, emit); }, t.node().v);
  }

 private:
  using Threads = std::vector<PiProcess>;

  // The cell holding `x`, if present.
  static std::optional<std::size_t> find_cell(const Threads& ths, const std::string& x, std::size_t except) {
    for (std::size_t j = 0; j < ths.size(); ++j) {
      if (j == except) continue;
      if (auto* c = as_cell(ths[j]); c && c->chan.name == x && is_nil(c->branches.front().cont) &&
                                     c->branches.front().value.is_literal()) {
        return j;
      }
    }
    return std::nullopt;
  }

  // Receives from the cell of `x` into thread i; returns the index of the
  // continuation, or nullopt when no cell is there.
  static std::optional<std::size_t> take_cell(Threads& ths, std::size_t i, const PiIn& n) {
    auto j = find_cell(ths, n.chan.name, i);
    if (!j) return std::nullopt;
    Value v = std::get<ELit>(as_cell(ths[*j])->branches.front().value.node().v).value;
    const auto& b = n.branches.front();
    ths[i] = subst_pi(b.cont, {{b.var, Expr::lit(v)}});
    ths.erase(ths.begin() + static_cast<std::ptrdiff_t>(*j));
    return *j < i ? i - 1 : i;
  }

  // Runs a freshly spawned updater to completion: captures, then re-emits.
  static void settle(Threads& ths, std::size_t k, const VirtualState& before) {
    const PiProcess t = ths[k];
    if (auto* p = std::get_if<PiPar>(&t.node().v)) {
      ths[k] = p->left;
      ths.push_back(p->right);
      std::size_t r = ths.size() - 1;
      settle(ths, r, before);
      settle(ths, k, before);
      return;
    }
    if (auto* in = std::get_if<PiIn>(&t.node().v); in && in->chan.kind == PiChan::Kind::Cell) {
      auto next = take_cell(ths, k, *in);
      if (!next) throw Error("pure_hml.store", "store cell `a_" + in->chan.name + "` is missing");
      settle(ths, *next, before);
      return;
    }
    if (auto* c = as_cell(t); c && !c->branches.front().value.is_literal()) {
      Value v = eval(c->branches.front().value, Binding{});
      auto old = before.find(c->chan.name);
      if (old != before.end() && old->second.index() != v.index()) {
        throw Error("pure_hml.sort", "update changes the sort of `@" + c->chan.name + "`");
      }
      ths[k] = pi::out(c->chan, Expr::lit(v));
    }
  }

  static VirtualState cells_of(const Threads& ths) {
    VirtualState s;
    for (const auto& t : ths) {
      if (auto* c = as_cell(t); c && c->branches.front().value.is_literal()) {
        s[c->chan.name] = std::get<ELit>(c->branches.front().value.node().v).value;
      }
    }
    return s;
  }

  void on(const PiNil&, Threads&, std::size_t, int, const Emit&) {}
  void on(const PiRepl&, Threads&, std::size_t, int, const Emit&) {}
  void on(const PiCall& n, Threads&, std::size_t, int, const Emit&) {
    throw Error("pure_hml.unbound", "call to unbound process variable `" + n.name + "`");
  }

  void on(const PiPar& n, Threads& ths, std::size_t i, int unfolds, const Emit& emit) {
    ths[i] = n.left;
    ths.push_back(n.right);
    act(ths, i, unfolds, emit);
    act(ths, ths.size() - 1, unfolds, emit);
  }

  void on(const PiRec& n, Threads& ths, std::size_t i, int unfolds, const Emit& emit) {
    if (unfolds >= opts_.max_unfold) throw Error("pure_hml.unguarded", "recursion `" + n.name + "` is unguarded");
    Value v = eval(n.init, Binding{});
    PiProcess body = subst_pi(n.body, {{n.param, Expr::lit(v)}});
    ths[i] = replace_pi_calls(body, n.name, [&](const Expr& arg) { return pi::rec(n.name, n.param, arg, n.body); });
    act(ths, i, unfolds + 1, emit);
  }

  void on(const PiJoin& n, Threads& ths, std::size_t i, int, const Emit& emit) {
    std::string s = detail::fresh_session(avoid_);
    ths[i] = rename_sessions(n.body, {{n.var, s}});
    emit(act::accept(n.shared, s, n.role), ths, false);
  }

  void on(const PiIn& n, Threads& ths, std::size_t i, int unfolds, const Emit& emit) {
    if (n.chan.kind == PiChan::Kind::Cell) {
      // A read: atomic with the action it guards.
      auto next = take_cell(ths, i, n);
      if (next) act(ths, *next, unfolds, emit);
      return;
    }
    if (n.chan.kind != PiChan::Kind::Session) return;
    for (const auto& b : n.branches) {
      for (const Value& v : domain_of(b.sort.value_or(Sort::Int), opts_.sort_bound).values()) {
        Threads next = ths;
        next[i] = subst_pi(b.cont, {{b.var, Expr::lit(v)}});
        emit(act::input(n.chan.name, n.chan.from, n.chan.to, Expr::lit(v), b.label), std::move(next), false);
      }
    }
  }

  void on(const PiOut& n, Threads& ths, std::size_t i, int, const Emit& emit) {
    if (n.chan.kind == PiChan::Kind::Cell) return;
    if (n.chan.kind == PiChan::Kind::Session) {
      const PiOutBranch* chosen = nullptr;
      for (const auto& b : n.branches) {
        if (!holds(b.guard, Binding{})) continue;
        if (chosen) throw Error("pure_hml.guards", "two guards hold in `" + print_pi(ths[i]) + "`");
        chosen = &b;
      }
      if (!chosen) throw Error("pure_hml.guards", "no guard holds in `" + print_pi(ths[i]) + "`");
      Value v = eval(chosen->value, Binding{});
      ths[i] = chosen->cont;
      emit(act::output(n.chan.name, n.chan.from, n.chan.to, Expr::lit(v), chosen->label), ths, false);
      return;
    }
    const auto& b = n.branches.front();
    Action label = act::chan_out(n.chan.name, b.value);
    std::optional<std::size_t> updater;
    for (std::size_t j = 0; j < ths.size(); ++j) {
      if (auto* u = as_updater(ths[j]); u && u->chan.name == n.chan.name) updater = j;
    }
    if (!updater) {
      if (n.chan.name != kSkipPort) throw Error("pure_hml.store", "no store updater for `" + n.chan.name + "`");
      ths[i] = b.cont;
      emit(label, ths, false);
      return;
    }
    VirtualState before = cells_of(ths);
    const auto& in = *as_updater(ths[*updater]);
    ths[i] = b.cont;
    ths.push_back(subst_pi(in.branches.front().cont, {{in.branches.front().var, b.value}}));
    settle(ths, ths.size() - 1, before);
    emit(label, ths, true);
  }

  PiOptions opts_;
  std::set<std::string> avoid_;
};

}  // namespace detail

/// The store read off the cells of a configuration.
inline VirtualState pi_store(const PiProcess& p) {
  std::vector<PiProcess> ths;
  detail::flatten_pi(p, ths);
  VirtualState s;
  for (const auto& t : ths) {
    if (auto* c = detail::as_cell(t); c && c->branches.front().value.is_literal()) {
      s[c->chan.name] = std::get<ELit>(c->branches.front().value.node().v).value;
    }
  }
  return s;
}

/// Exactly one cell per variable of `vars` and no other cells.
inline bool store_linear(const PiProcess& p, const std::set<std::string>& vars) {
  std::vector<PiProcess> ths;
  detail::flatten_pi(p, ths);
  std::map<std::string, int> count;
  for (const auto& t : ths) {
    if (auto* c = detail::as_cell(t)) ++count[c->chan.name];
  }
  if (count.size() != vars.size()) return false;
  for (const auto& x : vars) {
    auto it = count.find(x);
    if (it == count.end() || it->second != 1) return false;
  }
  return true;
}

/// All one-step successors; reads and updater runs happen inside the step.
inline std::vector<PiTransition> pi_step(const PiConfig& c, const PiOptions& opts = {}) {
  std::vector<PiProcess> ths;
  detail::flatten_pi(c.process, ths);
  std::set<std::string> avoid;
  collect_pi_names(c.process, avoid);
  detail::PiStepper stepper(opts, avoid);
  std::vector<PiTransition> out;
  for (std::size_t i = 0; i < ths.size(); ++i) {
    stepper.act(ths, i, 0, [&](Action a, std::vector<PiProcess> next, bool spawned) {
      int reps = c.replications + (spawned ? 1 : 0);
      out.push_back(PiTransition{std::move(a), PiConfig{detail::assemble(next), reps}, reps > opts.repl_depth});
    });
  }
  return out;
}

namespace detail {

class PiSystem {
 public:
  using State = PiConfig;
  using Step = PiTransition;

  explicit PiSystem(PiOptions o) : opts_(o) {}

  std::vector<Step> steps(const PiConfig& c) const { return pi_step(c, opts_); }
  VirtualState store(const PiConfig& c) const { return pi_store(c.process); }
  std::string key(const PiConfig& c) const { return print_pi(c.process); }

  std::optional<VirtualState> effect(const Action& pat, const VirtualState& s,
                                     const std::map<std::string, Value>& vars) const {
    auto* o = std::get_if<ChanOutAction>(&pat.v);
    if (!o) return std::nullopt;
    if (o->channel == kSkipPort) return s;
    if (!s.count(o->channel)) return std::nullopt;
    return apply_update(Update::assign(o->channel, o->value), s, vars);
  }
  bool is_update(const Action& a) const { return std::holds_alternative<ChanOutAction>(a.v); }

  std::optional<std::vector<Value>> probe(const Action& pat, const PiConfig& c) const {
    auto* o = std::get_if<ChanOutAction>(&pat.v);
    if (!o || o->channel.rfind("a_", 0) != 0) return std::nullopt;
    std::string x = o->channel.substr(2);
    std::vector<PiProcess> ths;
    flatten_pi(c.process, ths);
    std::vector<Value> out;
    bool any = false;
    for (const auto& t : ths) {
      if (auto* cell = as_cell(t); cell && cell->chan.name == x) {
        any = true;
        if (cell->branches.front().value.is_literal()) out.push_back(std::get<ELit>(cell->branches.front().value.node().v).value);
      }
    }
    if (!any) return std::nullopt;
    return out;
  }

 private:
  PiOptions opts_;
};

}  // namespace detail

/// Satisfaction over the pi transition system. Observing a cell `[~a_x<v>]`
/// reads the cell without consuming it.
inline Verdict pi_sat(const PiProcess& p, const Formula& f, const PiOptions& opts = {}) {
  return detail::run_checker(detail::PiSystem(opts), PiConfig{p, 0}, f, opts.mu_depth, opts.sort_bound);
}

struct RoundTrip {
  Verdict direct;
  Verdict encoded;
  bool agree() const { return direct.inconclusive() || encoded.inconclusive() || direct.kind == encoded.kind; }
};

/// Checks `P, sigma |= phi` both directly and through the encodings.
inline RoundTrip round_trip(const Process& p, const VirtualState& s, const Formula& f, const PiOptions& opts = {}) {
  SatOptions so;
  so.sort_bound = opts.sort_bound;
  so.mu_depth = opts.mu_depth;
  so.max_unfold = opts.max_unfold;
  std::set<std::string> store;
  for (const auto& [x, v] : s) store.insert(x);
  RoundTrip r;
  r.direct = sat(Config{p, s}, f, so);
  r.encoded = pi_sat(pi::par(encode_store(s), encode_process(p)), encode_formula(f, store), opts);
  return r;
}

}  // namespace mpsa
