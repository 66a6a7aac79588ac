#pragma once

#include <string>

#include "mpsa/kernel/names.hpp"

namespace mpsa {

namespace detail {

inline Formula embed_at(const LocalAssertion& l, const std::string& s, const std::string& p,
                        const std::map<std::string, bool>& rec_vars) {
  return std::visit(
      [&](const auto& n) -> Formula {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LEnd>) {
          return fml::tt();
        } else if constexpr (std::is_same_v<T, LSelect> || std::is_same_v<T, LBranch>) {
          constexpr bool out = std::is_same_v<T, LSelect>;
          // Labels only need to appear in the pattern when they discriminate.
          bool labelled = n.branches.size() > 1;
          std::vector<Formula> parts;
          for (const auto& b : n.branches) {
            std::optional<std::string> label;
            if (labelled) label = b.label;
            Formula cont = fml::must(act::update(b.update), embed_at(b.cont, s, p, rec_vars));
            Formula body;
            Action a;
            if constexpr (out) {
              a = act::output(s, p, n.partner, Expr::var(b.var), label);
              body = fml::conj(fml::pred(b.pred), cont);
            } else {
              a = act::input(s, n.partner, p, Expr::var(b.var), label);
              body = fml::implies(fml::pred(b.pred), cont);
            }
            parts.push_back(fml::forall(b.var, b.sort, fml::must(a, body)));
          }
          return fml::conj_all(parts);
        } else if constexpr (std::is_same_v<T, LRec>) {
          auto inner = rec_vars;
          inner[n.name] = true;
          Formula body = fml::mu(n.name, embed_at(n.body, s, p, inner));
          // A loop whose body reads its parameter is checked for every
          // parameter value satisfying the invariant.
          if (free_vars(body).count(n.param)) {
            return fml::forall(n.param, n.sort, fml::implies(fml::pred(n.invariant), body));
          }
          return body;
        } else {
          if (!rec_vars.count(n.name)) throw Error("embedding.unbound", "unbound recursion variable `" + n.name + "`");
          return fml::var(n.name);
        }
      },
      l.node().v);
}

}  // namespace detail

/// The formula a process playing `role` in session `session` must satisfy.
inline Formula embed(const LocalAssertion& l, const std::string& session, const std::string& role) {
  return detail::embed_at(l, session, role, {});
}

inline Formula embed(const LocalAssertion& l, const SessionRole& at) { return embed(l, at.session, at.role); }

inline constexpr const char* kSessionBinder = "s'";

/// For every role of the table: whoever joins a session on `shared` in that
/// role then behaves as the role's assertion prescribes.
inline Formula embed_env_entry(const std::string& shared, const RoleTable& table) {
  if (table.empty()) throw Error("embedding.empty_table", "shared name `" + shared + "` has no roles");
  std::vector<Formula> parts;
  for (const auto& [role, l] : table) {
    parts.push_back(fml::forall(kSessionBinder, Sort::Session,
                                fml::must(act::accept(shared, kSessionBinder, role), embed(l, kSessionBinder, role))));
  }
  return fml::conj_all(parts);
}

/// Number of communication modalities along the deepest path.
inline int comm_depth(const Formula& f) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FAnd>) {
          return std::max(comm_depth(n.lhs), comm_depth(n.rhs));
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return comm_depth(n.concl);
        } else if constexpr (std::is_same_v<T, FMust>) {
          return (is_communication(n.action) ? 1 : 0) + comm_depth(n.body);
        } else if constexpr (std::is_same_v<T, FForall> || std::is_same_v<T, FMu>) {
          return comm_depth(n.body);
        } else {
          return 0;
        }
      },
      f.node().v);
}

inline int comm_depth(const LocalAssertion& l) {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LSelect> || std::is_same_v<T, LBranch>) {
          int d = 0;
          for (const auto& b : n.branches) d = std::max(d, 1 + comm_depth(b.cont));
          return d;
        } else if constexpr (std::is_same_v<T, LRec>) {
          return comm_depth(n.body);
        } else {
          return 0;
        }
      },
      l.node().v);
}

}  // namespace mpsa
