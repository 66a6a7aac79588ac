#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mpsa/embedding.hpp"
#include "mpsa/kernel/names.hpp"
#include "mpsa/kernel/print.hpp"

namespace mpsa {

enum class PacketKind { Plain, Output, Input };

/// One transition label: a modality together with the quantifier, predicate
/// and update that travel with it.
struct AutomatonPacket {
  std::optional<std::pair<std::string, Sort>> binder;
  Action action;
  PacketKind kind = PacketKind::Plain;
  Formula pred;                 // Output / Input
  std::optional<Update> update;

  /// The packet with `inner` in its hole.
  Formula wrap(const Formula& inner) const {
    Formula body = update ? fml::must(act::update(*update), inner) : inner;
    if (kind == PacketKind::Output) body = fml::conj(pred, body);
    if (kind == PacketKind::Input) body = fml::implies(pred, body);
    Formula f = fml::must(action, body);
    if (binder) f = fml::forall(binder->first, binder->second, f);
    return f;
  }

  std::string label() const { return print_formula(wrap(fml::var("_"))); }
};

struct AutomatonEdge {
  int from = 0;
  int to = 0;
  AutomatonPacket packet;
};

/// A directed automaton over packets; state 0 is the source.
struct PacketAutomaton {
  int states = 1;
  std::vector<AutomatonEdge> edges;

  std::vector<std::vector<int>> out() const {
    std::vector<std::vector<int>> o(states);
    for (std::size_t i = 0; i < edges.size(); ++i) o[edges[i].from].push_back(static_cast<int>(i));
    return o;
  }
};

namespace detail {

// Splits a modality into its packet and the formula that follows it.
inline std::pair<AutomatonPacket, Formula> take_packet(const Formula& f) {
  AutomatonPacket pk;
  const Formula* cur = &f;
  if (auto* q = std::get_if<FForall>(&cur->node().v)) {
    pk.binder = {q->var, q->sort};
    cur = &q->body;
  }
  auto* m = std::get_if<FMust>(&cur->node().v);
  if (!m) throw Error("automata.form", "expected a modality, found `" + print_formula(f) + "`");
  pk.action = m->action;
  auto update_tail = [](const Formula& g) -> const FMust* {
    auto* u = std::get_if<FMust>(&g.node().v);
    return u && std::holds_alternative<UpdateAction>(u->action.v) ? u : nullptr;
  };
  if (is_communication(m->action)) {
    if (auto* c = std::get_if<FAnd>(&m->body.node().v)) {
      if (auto* u = update_tail(c->rhs); u && !std::holds_alternative<FMust>(c->lhs.node().v)) {
        pk.kind = PacketKind::Output;
        pk.pred = c->lhs;
        pk.update = std::get<UpdateAction>(u->action.v).update;
        return {pk, u->body};
      }
    }
    if (auto* c = std::get_if<FImplies>(&m->body.node().v)) {
      if (auto* u = update_tail(c->concl)) {
        pk.kind = PacketKind::Input;
        pk.pred = c->hyp;
        pk.update = std::get<UpdateAction>(u->action.v).update;
        return {pk, u->body};
      }
    }
  }
  if (pk.binder) throw Error("automata.form", "quantifier not followed by a packet in `" + print_formula(f) + "`");
  return {pk, m->body};
}

}  // namespace detail

/// One state per syntactic point between packets; `mu` binds the current
/// state and a recursion variable is an edge back to its binder.
inline PacketAutomaton formula_to_automaton(const Formula& f) {
  PacketAutomaton a;
  std::function<void(const Formula&, int, std::map<std::string, int>&)> build =
      [&](const Formula& g, int s, std::map<std::string, int>& mu) {
        const auto& v = g.node().v;
        if (std::holds_alternative<FTrue>(v)) return;
        if (auto* c = std::get_if<FAnd>(&v)) {
          build(c->lhs, s, mu);
          build(c->rhs, s, mu);
          return;
        }
        if (auto* m = std::get_if<FMu>(&v)) {
          auto saved = mu;
          mu[m->name] = s;
          build(m->body, s, mu);
          mu = saved;
          return;
        }
        if (std::holds_alternative<FVar>(v)) {
          throw Error("automata.form", "recursion variable not directly under a modality");
        }
        auto [pk, rest] = detail::take_packet(g);
        if (auto* x = std::get_if<FVar>(&rest.node().v)) {
          auto it = mu.find(x->name);
          if (it == mu.end()) throw Error("automata.form", "unbound recursion variable `" + x->name + "`");
          a.edges.push_back({s, it->second, pk});
          return;
        }
        int t = a.states++;
        a.edges.push_back({s, t, pk});
        build(rest, t, mu);
      };
  std::map<std::string, int> mu;
  build(f, 0, mu);
  return a;
}

inline std::set<std::string> packet_names(const PacketAutomaton& a) {
  std::set<std::string> out;
  for (const auto& e : a.edges) out.merge(free_names(e.packet.wrap(fml::tt())));
  return out;
}

/// Asynchronous product: every transition moves exactly one component.
inline PacketAutomaton product(const PacketAutomaton& a, const PacketAutomaton& b) {
  auto na = packet_names(a);
  for (const auto& n : packet_names(b)) {
    if (na.count(n)) throw Error("automata.names", "automata share the name `" + n + "`");
  }
  PacketAutomaton p;
  p.states = 0;
  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> work;
  auto intern = [&](std::pair<int, int> s) {
    auto [it, fresh] = id.emplace(s, p.states);
    if (fresh) {
      ++p.states;
      work.push_back(s);
    }
    return it->second;
  };
  intern({0, 0});
  auto oa = a.out(), ob = b.out();
  for (std::size_t k = 0; k < work.size(); ++k) {
    auto [i, j] = work[k];
    int from = id.at({i, j});
    for (int e : oa[i]) p.edges.push_back({from, intern({a.edges[e].to, j}), a.edges[e].packet});
    for (int e : ob[j]) p.edges.push_back({from, intern({i, b.edges[e].to}), b.edges[e].packet});
  }
  return p;
}

inline constexpr int kDefaultStateCap = 10'000;

/// Unfolds `a` into a tree whose only other edges lead back to ancestors:
/// a state reached again on the current branch becomes a back edge, any
/// other revisit is a fresh copy.
inline PacketAutomaton expand_to_branch(const PacketAutomaton& a, int cap = kDefaultStateCap) {
  PacketAutomaton t;
  auto out = a.out();
  std::vector<std::pair<int, int>> path;  // (original state, copy)
  std::function<void(int, int)> go = [&](int orig, int copy) {
    path.push_back({orig, copy});
    for (int e : out[orig]) {
      const auto& edge = a.edges[e];
      int back = -1;
      for (auto it = path.rbegin(); it != path.rend(); ++it) {
        if (it->first == edge.to) {
          back = it->second;
          break;
        }
      }
      if (back >= 0) {
        t.edges.push_back({copy, back, edge.packet});
        continue;
      }
      if (t.states >= cap) throw Error("automata.budget", "expansion exceeds " + std::to_string(cap) + " states");
      int next = t.states++;
      t.edges.push_back({copy, next, edge.packet});
      go(edge.to, next);
    }
    path.pop_back();
  };
  go(0, 0);
  return t;
}

/// True when forward edges form a tree rooted at the source and every other
/// edge leads back to an ancestor.
inline bool is_branch_form(const PacketAutomaton& a) {
  auto out = a.out();
  std::vector<int> mark(a.states, 0);  // 0 unseen, 1 on path, 2 done
  std::function<bool(int)> go = [&](int s) {
    mark[s] = 1;
    for (int e : out[s]) {
      int t = a.edges[e].to;
      if (mark[t] == 1) continue;
      if (mark[t] == 2) return false;
      if (!go(t)) return false;
    }
    mark[s] = 2;
    return true;
  };
  return go(0);
}

/// Back-edge targets become `mu` binders, named A, B, ... in preorder;
/// branching becomes conjunction.
inline Formula automaton_to_formula(const PacketAutomaton& a) {
  if (!is_branch_form(a)) throw Error("automata.form", "automaton is not in branch form");
  auto out = a.out();
  std::vector<int> depth(a.states, -1), order;
  std::set<int> targets;
  std::function<void(int, int)> scan = [&](int s, int d) {
    depth[s] = d;
    order.push_back(s);
    for (int e : out[s]) {
      int t = a.edges[e].to;
      if (depth[t] >= 0) {
        targets.insert(t);
      } else {
        scan(t, d + 1);
      }
    }
  };
  scan(0, 0);
  auto avoid = packet_names(a);
  std::map<int, std::string> names;
  std::set<std::string> used = avoid;
  int next = 0;
  for (int s : order) {
    if (!targets.count(s)) continue;
    std::string n;
    do {
      n = next < 26 ? std::string(1, static_cast<char>('A' + next)) : "X" + std::to_string(next - 25);
      ++next;
    } while (used.count(n));
    used.insert(n);
    names[s] = n;
  }
  std::function<Formula(int)> emit = [&](int s) -> Formula {
    std::vector<Formula> parts;
    for (int e : out[s]) {
      const auto& edge = a.edges[e];
      bool back = depth[edge.to] <= depth[s];
      parts.push_back(edge.packet.wrap(back ? fml::var(names.at(edge.to)) : emit(edge.to)));
    }
    Formula body = fml::conj_all(parts);
    if (names.count(s)) return fml::mu(names.at(s), body);
    return body;
  };
  return emit(0);
}

/// Strong bisimilarity of the two sources, by partition refinement.
inline bool bisimilar(const PacketAutomaton& a, const PacketAutomaton& b) {
  int n = a.states + b.states;
  std::vector<std::vector<std::pair<std::string, int>>> succ(n);
  for (const auto& e : a.edges) succ[e.from].push_back({e.packet.label(), e.to});
  for (const auto& e : b.edges) succ[a.states + e.from].push_back({e.packet.label(), a.states + e.to});
  std::vector<int> block(n, 0);
  for (;;) {
    std::map<std::pair<int, std::set<std::pair<std::string, int>>>, int> ids;
    std::vector<int> next(n);
    for (int s = 0; s < n; ++s) {
      std::set<std::pair<std::string, int>> sig;
      for (const auto& [l, t] : succ[s]) sig.insert({l, block[t]});
      auto [it, fresh] = ids.emplace(std::make_pair(block[s], sig), static_cast<int>(ids.size()));
      next[s] = it->second;
    }
    int before = *std::max_element(block.begin(), block.end()) + 1;
    block = next;
    if (static_cast<int>(ids.size()) == before) break;
  }
  return block[0] == block[a.states];
}

inline std::string to_dot(const PacketAutomaton& a, const std::string& name = "A") {
  std::ostringstream os;
  os << "digraph " << name << " {\n  0 [shape=doublecircle];\n";
  for (const auto& e : a.edges) {
    std::string l = e.packet.label();
    std::string esc;
    for (char c : l) {
      if (c == '"' || c == '\\') esc += '\\';
      esc += c;
    }
    os << "  " << e.from << " -> " << e.to << " [label=\"" << esc << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

/// Sizes of every stage of the pipeline, for reporting.
struct InterleaveReport {
  std::vector<int> component_states;
  int product_states = 1;
  int expanded_states = 1;
  std::vector<PacketAutomaton> components;
  PacketAutomaton product;
  PacketAutomaton expanded;
  Formula formula;
};

inline InterleaveReport rec_interleave(const std::vector<Formula>& parts, int cap = kDefaultStateCap) {
  InterleaveReport r;
  PacketAutomaton acc;
  for (const auto& f : parts) {
    auto a = formula_to_automaton(f);
    r.component_states.push_back(a.states);
    r.components.push_back(a);
    acc = product(acc, a);
  }
  r.product = acc;
  r.product_states = acc.states;
  r.expanded = expand_to_branch(acc, cap);
  r.expanded_states = r.expanded.states;
  r.formula = automaton_to_formula(r.expanded);
  return r;
}

inline InterleaveReport rec_interleave(const SessionEnv& delta, int cap = kDefaultStateCap) {
  std::vector<Formula> parts;
  for (const auto& [at, l] : delta) parts.push_back(embed(l, at));
  return rec_interleave(parts, cap);
}

}  // namespace mpsa
