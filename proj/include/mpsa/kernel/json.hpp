#pragma once

// JSON export of the abstract syntax. Field names follow the type and field
// names of the kernel structures.

#include <json.hpp>

#include "mpsa/kernel/ast.hpp"
#include "mpsa/kernel/print.hpp"

namespace mpsa {

using Json = nlohmann::ordered_json;

inline Json to_json(const Value& v) {
  if (is_bool(v)) return as_bool(v);
  return as_int(v);
}

inline const char* op_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "Add";
    case BinOp::Sub: return "Sub";
    case BinOp::Mul: return "Mul";
    case BinOp::Lt: return "Lt";
    case BinOp::Le: return "Le";
    case BinOp::Gt: return "Gt";
    case BinOp::Ge: return "Ge";
    case BinOp::Eq: return "Eq";
    case BinOp::Ne: return "Ne";
    case BinOp::And: return "And";
    case BinOp::Or: return "Or";
  }
  return "?";
}

inline Json to_json(const Expr& e) {
  return std::visit(
      [](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ELit>) {
          return {{"kind", "Lit"}, {"value", to_json(n.value)}};
        } else if constexpr (std::is_same_v<T, EVar>) {
          return {{"kind", "Var"}, {"name", n.name}};
        } else if constexpr (std::is_same_v<T, EState>) {
          return {{"kind", "StateVar"}, {"name", n.name}};
        } else if constexpr (std::is_same_v<T, EUnary>) {
          return {{"kind", n.op == UnOp::Not ? "Not" : "Neg"}, {"arg", to_json(n.arg)}};
        } else {
          return {{"kind", op_name(n.op)}, {"lhs", to_json(n.lhs)}, {"rhs", to_json(n.rhs)}};
        }
      },
      e.node().v);
}

inline Json to_json(const Update& u) {
  Json out = Json::array();
  for (const auto& a : u.assignments) out.push_back({{"var", a.var}, {"rhs", to_json(a.rhs)}});
  return out;
}

inline Json to_json(const VirtualState& s) {
  Json out = Json::object();
  for (const auto& [k, v] : s) out[k] = to_json(v);
  return out;
}

inline Json to_json(const LocalAssertion& l) {
  auto branches = [](const std::vector<AssertionBranch>& bs) {
    Json out = Json::array();
    for (const auto& b : bs) {
      out.push_back({{"label", b.label},
                     {"var", b.var},
                     {"sort", to_string(b.sort)},
                     {"pred", to_json(b.pred)},
                     {"update", to_json(b.update)},
                     {"cont", to_json(b.cont)}});
    }
    return out;
  };
  return std::visit(
      [&](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, LEnd>) {
          return {{"kind", "End"}};
        } else if constexpr (std::is_same_v<T, LSelect>) {
          return {{"kind", "Select"}, {"partner", n.partner}, {"branches", branches(n.branches)}};
        } else if constexpr (std::is_same_v<T, LBranch>) {
          return {{"kind", "Branch"}, {"partner", n.partner}, {"branches", branches(n.branches)}};
        } else if constexpr (std::is_same_v<T, LRec>) {
          return {{"kind", "Rec"},          {"name", n.name},
                  {"param", n.param},       {"sort", to_string(n.sort)},
                  {"init_var", n.init_var}, {"init_pred", to_json(n.init_pred)},
                  {"invariant", to_json(n.invariant)}, {"body", to_json(n.body)}};
        } else {
          return {{"kind", "RecCall"}, {"name", n.name}, {"arg_var", n.arg_var}, {"arg_pred", to_json(n.arg_pred)}};
        }
      },
      l.node().v);
}

inline Json to_json(const Process& p) {
  return std::visit(
      [&](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, PInact>) {
          return {{"kind", "Inact"}};
        } else if constexpr (std::is_same_v<T, PRequest> || std::is_same_v<T, PAccept>) {
          return {{"kind", std::is_same_v<T, PRequest> ? "Request" : "Accept"},
                  {"shared", n.shared},
                  {"role", n.role},
                  {"var", n.var},
                  {"body", to_json(n.body)}};
        } else if constexpr (std::is_same_v<T, PSelect>) {
          Json bs = Json::array();
          for (const auto& b : n.branches) {
            bs.push_back({{"guard", to_json(b.guard)},
                          {"label", b.label},
                          {"payload", to_json(b.payload)},
                          {"var", b.var},
                          {"update", to_json(b.update)},
                          {"cont", to_json(b.cont)}});
          }
          return {{"kind", "GuardedSelect"}, {"session", n.session}, {"from", n.from}, {"to", n.to}, {"branches", bs}};
        } else if constexpr (std::is_same_v<T, PBranch>) {
          Json bs = Json::array();
          for (const auto& b : n.branches) {
            Json j = {{"label", b.label}, {"var", b.var}};
            if (b.sort) j["sort"] = to_string(*b.sort);
            j["update"] = to_json(b.update);
            j["cont"] = to_json(b.cont);
            bs.push_back(j);
          }
          return {{"kind", "Branching"}, {"session", n.session}, {"from", n.from}, {"to", n.to}, {"branches", bs}};
        } else if constexpr (std::is_same_v<T, PPar>) {
          return {{"kind", "Par"}, {"left", to_json(n.left)}, {"right", to_json(n.right)}};
        } else if constexpr (std::is_same_v<T, PRecDef>) {
          return {{"kind", "RecDef"}, {"name", n.name}, {"param", n.param}, {"init", to_json(n.init)},
                  {"body", to_json(n.body)}};
        } else if constexpr (std::is_same_v<T, PRecCall>) {
          return {{"kind", "RecCall"}, {"name", n.name}, {"arg", to_json(n.arg)}};
        } else {
          return {{"kind", "Pending"}, {"update", to_json(n.update)}, {"cont", to_json(n.cont)}};
        }
      },
      p.node().v);
}

inline Json to_json(const Action& a) {
  return std::visit(
      [&](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CommAction>) {
          Json j = {{"kind", n.dir == Direction::Out ? "Output" : "Input"},
                    {"session", n.session},
                    {"from", n.from},
                    {"to", n.to}};
          if (n.label) j["label"] = *n.label;
          j["value"] = to_json(n.value);
          return j;
        } else if constexpr (std::is_same_v<T, UpdateAction>) {
          return {{"kind", "UpdateAct"}, {"update", to_json(n.update)}};
        } else if constexpr (std::is_same_v<T, AcceptAction>) {
          return {{"kind", "SessionAccept"}, {"shared", n.shared}, {"session", n.session}, {"role", n.role}};
        } else if constexpr (std::is_same_v<T, LabelAction>) {
          return {{"kind", "Label"}, {"label", n.label}};
        } else {
          return {{"kind", "ChanOutput"}, {"channel", n.channel}, {"value", to_json(n.value)}};
        }
      },
      a.v);
}

inline Json to_json(const Formula& f) {
  return std::visit(
      [&](const auto& n) -> Json {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, FTrue>) {
          return {{"kind", "True"}};
        } else if constexpr (std::is_same_v<T, FAnd>) {
          return {{"kind", "And"}, {"lhs", to_json(n.lhs)}, {"rhs", to_json(n.rhs)}};
        } else if constexpr (std::is_same_v<T, FImplies>) {
          return {{"kind", "Implies"}, {"hyp", to_json(n.hyp)}, {"concl", to_json(n.concl)}};
        } else if constexpr (std::is_same_v<T, FMust>) {
          return {{"kind", "Must"}, {"action", to_json(n.action)}, {"body", to_json(n.body)}};
        } else if constexpr (std::is_same_v<T, FPred>) {
          return {{"kind", "Pred"}, {"pred", to_json(n.pred)}};
        } else if constexpr (std::is_same_v<T, FForall>) {
          return {{"kind", "Forall"}, {"var", n.var}, {"sort", to_string(n.sort)}, {"body", to_json(n.body)}};
        } else if constexpr (std::is_same_v<T, FMu>) {
          return {{"kind", "Mu"}, {"name", n.name}, {"body", to_json(n.body)}};
        } else {
          return {{"kind", "Var"}, {"name", n.name}};
        }
      },
      f.node().v);
}

}  // namespace mpsa
