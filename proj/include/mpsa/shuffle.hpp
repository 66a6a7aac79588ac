#pragma once

#include <set>
#include <string>
#include <vector>

#include "mpsa/embedding.hpp"
#include "mpsa/kernel/names.hpp"
#include "mpsa/kernel/print.hpp"

namespace mpsa {

struct ShuffleOptions {
  /// Read the right conjunct of the modality rule as `[l2]([l1]phi1 /\ phi2)`
  /// instead of `[l2]([l1]phi1 >< phi2)`.
  bool literal = false;
  std::size_t budget = 100'000;  // conjunctions the result may contain
};

/// A communication together with the predicate and update that travel
/// with it: `[l](A /\ [E] _)`, `[l](A => [E] _)` or `[l] _`.
struct Packet {
  Formula rest;  // what follows the hole
  std::function<Formula(const Formula&)> rebuild;
};

inline Packet split_packet(const FMust& m) {
  const auto& body = m.body.node().v;
  Action a = m.action;
  if (is_communication(a)) {
    auto update_tail = [&](const Formula& f) -> const FMust* {
      auto* u = std::get_if<FMust>(&f.node().v);
      return u && std::holds_alternative<UpdateAction>(u->action.v) ? u : nullptr;
    };
    if (auto* c = std::get_if<FAnd>(&body); c && !std::holds_alternative<FMust>(c->lhs.node().v)) {
      if (auto* u = update_tail(c->rhs)) {
        Formula pred = c->lhs;
        Action e = u->action;
        auto rb = [a, pred, e](const Formula& x) { return fml::must(a, fml::conj(pred, fml::must(e, x))); };
        return {u->body, rb};
      }
    }
    if (auto* c = std::get_if<FImplies>(&body)) {
      if (auto* u = update_tail(c->concl)) {
        Formula hyp = c->hyp;
        Action e = u->action;
        auto rb = [a, hyp, e](const Formula& x) { return fml::must(a, fml::implies(hyp, fml::must(e, x))); };
        return {u->body, rb};
      }
    }
    if (auto* u = update_tail(m.body)) {
      Action e = u->action;
      auto rb = [a, e](const Formula& x) { return fml::must(a, fml::must(e, x)); };
      return {u->body, rb};
    }
  }
  auto rb = [a](const Formula& x) { return fml::must(a, x); };
  return {m.body, rb};
}

/// Every name a formula mentions, bound or free, including variables.
inline std::set<std::string> all_names(const Formula& f) {
  std::set<std::string> out = all_vars(f);
  out.merge(free_names(f));
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FAnd>) {
            go(n.lhs);
            go(n.rhs);
          } else if constexpr (std::is_same_v<T, FImplies>) {
            go(n.concl);
          } else if constexpr (std::is_same_v<T, FMust>) {
            if (auto* c = std::get_if<CommAction>(&n.action.v)) out.insert(c->session);
            go(n.body);
          } else if constexpr (std::is_same_v<T, FForall> || std::is_same_v<T, FMu>) {
            go(n.body);
          }
        },
        g.node().v);
  };
  go(f);
  return out;
}

namespace detail {

class Shuffler {
 public:
  explicit Shuffler(ShuffleOptions o) : opts_(o) {}

  Formula conj(Formula a, Formula b) {
    if (++conjuncts_ > opts_.budget) {
      throw Error("shuffle.budget", "interleaving exceeds the budget of " + std::to_string(opts_.budget) + " conjunctions");
    }
    return fml::conj(std::move(a), std::move(b));
  }

  // Pulls a quantifier out of `q`, renaming its variable away from `other`.
  std::pair<std::string, Formula> open(const FForall& q, const Formula& other) {
    auto avoid = all_names(other);
    if (!avoid.count(q.var)) return {q.var, q.body};
    auto used = all_names(q.body);
    used.merge(avoid);
    std::string x = fresh_name(q.var, used);
    if (q.sort == Sort::Session) return {x, rename_names(q.body, {{q.var, x}})};
    return {x, subst_formula(q.body, {{q.var, Expr::var(x)}})};
  }

  Formula run(const Formula& a, const Formula& b) {
    const auto& x = a.node().v;
    const auto& y = b.node().v;
    if (std::holds_alternative<FTrue>(y)) return a;
    if (std::holds_alternative<FTrue>(x)) return b;
    if (std::holds_alternative<FMu>(x) || std::holds_alternative<FVar>(x) || std::holds_alternative<FMu>(y) ||
        std::holds_alternative<FVar>(y)) {
      throw Error("shuffle.recursion", "recursive formulae are interleaved through automata, not by rewriting");
    }
    if (auto* c = std::get_if<FAnd>(&x)) return conj(run(c->lhs, b), run(c->rhs, b));
    if (auto* c = std::get_if<FAnd>(&y)) return conj(run(a, c->lhs), run(a, c->rhs));
    if (auto* q = std::get_if<FForall>(&x)) {
      auto [v, body] = open(*q, b);
      return fml::forall(v, q->sort, run(body, b));
    }
    if (auto* q = std::get_if<FForall>(&y)) {
      auto [v, body] = open(*q, a);
      return fml::forall(v, q->sort, run(a, body));
    }
    if (auto* i = std::get_if<FImplies>(&x)) return fml::implies(i->hyp, run(i->concl, b));
    if (auto* i = std::get_if<FImplies>(&y)) return fml::implies(i->hyp, run(a, i->concl));
    if (std::holds_alternative<FPred>(x)) return conj(a, b);
    if (std::holds_alternative<FPred>(y)) return conj(a, b);
    auto p1 = split_packet(std::get<FMust>(x));
    auto p2 = split_packet(std::get<FMust>(y));
    Formula left = p1.rebuild(run(p1.rest, b));
    Formula right = p2.rebuild(opts_.literal ? conj(a, p2.rest) : run(a, p2.rest));
    return conj(left, right);
  }

 private:
  ShuffleOptions opts_;
  std::size_t conjuncts_ = 0;
};

}  // namespace detail

/// Interleaving of two formulae with disjoint free names.
inline Formula shuffle(const Formula& a, const Formula& b, const ShuffleOptions& opts = {}) {
  auto na = free_names(a);
  std::string clash;
  for (const auto& n : free_names(b)) {
    if (na.count(n)) clash += (clash.empty() ? "" : ", ") + n;
  }
  if (!clash.empty()) throw Error("shuffle.names", "formulae share free names: " + clash);
  return detail::Shuffler(opts).run(a, b);
}

/// The interleaving of the embeddings of every entry of Delta and Gamma.
inline Formula env_formula(const SessionEnv& delta, const SharedEnv& gamma, const ShuffleOptions& opts = {}) {
  std::vector<Formula> parts;
  std::set<std::string> sessions;
  for (const auto& [at, l] : delta) {
    if (!sessions.insert(at.session).second) {
      throw Error("shuffle.names", "session `" + at.session + "` appears more than once in the session environment");
    }
    parts.push_back(embed(l, at));
  }
  for (const auto& [a, table] : gamma) parts.push_back(embed_env_entry(a, table));
  if (parts.empty()) return fml::tt();
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = shuffle(acc, parts[i], opts);
  return acc;
}

namespace detail {

// `true` contributes no chain, so conjuncts that are trivially true vanish.
inline std::vector<Formula> split_chains(const Formula& f) {
  return std::visit(
      [&](const auto& n) -> std::vector<Formula> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FTrue>) {
          return {};
        } else if constexpr (std::is_same_v<T, FAnd>) {
          auto l = split_chains(n.lhs);
          auto r = split_chains(n.rhs);
          l.insert(l.end(), r.begin(), r.end());
          return l;
        } else if constexpr (std::is_same_v<T, FMust> || std::is_same_v<T, FForall> || std::is_same_v<T, FImplies>) {
          Formula inner;
          if constexpr (std::is_same_v<T, FImplies>) {
            inner = n.concl;
          } else {
            inner = n.body;
          }
          auto wrap = [&](const Formula& c) {
            if constexpr (std::is_same_v<T, FMust>) {
              return fml::must(n.action, c);
            } else if constexpr (std::is_same_v<T, FForall>) {
              return fml::forall(n.var, n.sort, c);
            } else {
              return fml::implies(n.hyp, c);
            }
          };
          auto cs = split_chains(inner);
          std::vector<Formula> out;
          if (cs.empty()) {
            if constexpr (std::is_same_v<T, FMust>) out.push_back(wrap(fml::tt()));
            return out;
          }
          for (const auto& c : cs) out.push_back(wrap(c));
          return out;
        } else {
          return {f};
        }
      },
      f.node().v);
}

}  // namespace detail

/// Splits a formula into conjunction-free chains by distributing
/// modalities, quantifiers and implications over conjunctions. `true` is
/// the single empty chain.
inline std::vector<Formula> chains(const Formula& f) {
  auto out = detail::split_chains(f);
  if (out.empty()) out.push_back(fml::tt());
  return out;
}

/// The sequence of communication and label modalities of a chain.
inline std::vector<Action> modality_path(const Formula& chain) {
  std::vector<Action> out;
  const Formula* cur = &chain;
  for (;;) {
    const auto& v = cur->node().v;
    if (auto* m = std::get_if<FMust>(&v)) {
      if (!std::holds_alternative<UpdateAction>(m->action.v)) out.push_back(m->action);
      cur = &m->body;
    } else if (auto* q = std::get_if<FForall>(&v)) {
      cur = &q->body;
    } else if (auto* i = std::get_if<FImplies>(&v)) {
      cur = &i->concl;
    } else if (auto* c = std::get_if<FAnd>(&v)) {
      // A packet predicate sits to the left of its update modality.
      cur = &c->rhs;
    } else {
      return out;
    }
  }
}

}  // namespace mpsa
