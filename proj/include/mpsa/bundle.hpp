#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mpsa/embedding.hpp"
#include "mpsa/kernel/parse.hpp"
#include "mpsa/predicates.hpp"

namespace mpsa {

/// A session environment entry given directly as a formula.
struct FormulaEntry {
  SessionRole at;
  Formula formula;
};

/// Everything a judgement needs, read from one text document:
///
///   precondition: @x > 10
///   state: @x: Int = 0 .. 31
///   gamma: a -> { p: <assertion>; q: <assertion> }
///   delta: s[p]: <assertion or formula>
///   sigma: @x = 11
///
/// A section runs until the next line that starts with a section name;
/// `#` starts a comment.
struct Bundle {
  Expr precondition = Expr::boolean(true);
  std::map<std::string, Domain> state;
  std::map<std::string, Sort> state_sorts;
  SharedEnv gamma;
  SessionEnv delta;
  std::vector<FormulaEntry> delta_formulas;
  std::optional<VirtualState> sigma;

  ParseOptions parse_options() const { return ParseOptions{state_sorts}; }

  /// Delta entries embedded, then the raw formula entries, in source order
  /// within each group.
  std::vector<Formula> delta_embedded() const {
    std::vector<Formula> out;
    for (const auto& [at, l] : delta) out.push_back(embed(l, at));
    for (const auto& e : delta_formulas) out.push_back(e.formula);
    return out;
  }

  /// Every state in the declared domains, in lexicographic order.
  std::vector<VirtualState> states() const {
    std::vector<std::pair<std::string, Domain>> vars(state.begin(), state.end());
    std::vector<VirtualState> out;
    Binding b;
    for_each_assignment({}, vars, b, [&](const Binding& a) {
      out.push_back(a.state);
      return true;
    });
    return out;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Splits on `sep` outside any bracket.
inline std::vector<std::string> split_top(std::string_view s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '{' || c == '(' || c == '[') ++depth;
    if (c == '}' || c == ')' || c == ']') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

inline Error bundle_error(const std::string& section, const std::string& msg) {
  return Error("kernel.syntax", "in `" + section + ":` section: " + msg);
}

inline std::string strip_state_name(const std::string& raw, const std::string& section) {
  std::string n = trim(raw);
  if (n.size() < 2 || n[0] != '@') throw bundle_error(section, "expected `@name`, found `" + n + "`");
  return n.substr(1);
}

inline Sort parse_sort_name(const std::string& s, const std::string& section) {
  if (s == "Int") return Sort::Int;
  if (s == "Nat") return Sort::Nat;
  if (s == "Bool") return Sort::Bool;
  throw bundle_error(section, "unknown sort `" + s + "`");
}

inline Value constant(const std::string& src, const std::string& section) {
  Expr e = parse_expr(src);
  if (!free_vars(e).empty() || !state_vars(e).empty()) throw bundle_error(section, "`" + src + "` is not a constant");
  return eval(e, Binding{});
}

// `s[p]`
inline SessionRole parse_at(const std::string& src, const std::string& section) {
  std::string s = trim(src);
  auto open = s.find('[');
  if (open == std::string::npos || s.back() != ']') throw bundle_error(section, "expected `s[p]`, found `" + s + "`");
  SessionRole at{trim(s.substr(0, open)), trim(s.substr(open + 1, s.size() - open - 2))};
  if (at.session.empty() || at.role.empty()) throw bundle_error(section, "expected `s[p]`, found `" + s + "`");
  return at;
}

}  // namespace detail

inline SessionRole parse_session_role(const std::string& src) { return detail::parse_at(src, "at"); }

inline Bundle parse_bundle(std::string_view src) {
  static const std::vector<std::string> kSections = {"precondition", "state", "gamma", "delta", "sigma"};
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in{std::string(src)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    bool header = false;
    for (const auto& s : kSections) {
      if (t.rfind(s + ":", 0) == 0) {
        entries.push_back({s, t.substr(s.size() + 1)});
        header = true;
        break;
      }
    }
    if (header) continue;
    if (entries.empty()) throw Error("kernel.syntax", "text before the first section: `" + t + "`");
    entries.back().second += "\n" + t;
  }

  Bundle b;
  // Declarations first, so assertions are sort-checked against them.
  for (const auto& [sec, body] : entries) {
    if (sec != "state") continue;
    for (const auto& decl : detail::split_top(body, ',')) {
      auto colon = decl.find(':');
      if (colon == std::string::npos) throw detail::bundle_error(sec, "expected `@x: Sort [= lo .. hi]`");
      std::string name = detail::strip_state_name(decl.substr(0, colon), sec);
      std::string rest = decl.substr(colon + 1);
      std::string range;
      if (auto eq = rest.find('='); eq != std::string::npos) {
        range = rest.substr(eq + 1);
        rest = rest.substr(0, eq);
      }
      Sort sort = detail::parse_sort_name(detail::trim(rest), sec);
      Domain d = domain_of(sort, kDefaultSortBound);
      if (!detail::trim(range).empty()) {
        auto dots = range.find("..");
        if (dots == std::string::npos || sort == Sort::Bool) throw detail::bundle_error(sec, "expected `lo .. hi`");
        Value lo = detail::constant(range.substr(0, dots), sec);
        Value hi = detail::constant(range.substr(dots + 2), sec);
        d = Domain::range(as_int(lo), as_int(hi));
      }
      b.state[name] = d;
      b.state_sorts[name] = sort;
    }
  }
  ParseOptions opts = b.parse_options();
  for (const auto& [sec, body] : entries) {
    if (sec == "precondition") {
      b.precondition = parse_expr(body, {}, opts);
    } else if (sec == "gamma") {
      auto arrow = body.find("->");
      if (arrow == std::string::npos) throw detail::bundle_error(sec, "expected `a -> { p: L; ... }`");
      std::string shared = detail::trim(body.substr(0, arrow));
      std::string table = detail::trim(body.substr(arrow + 2));
      if (table.size() < 2 || table.front() != '{' || table.back() != '}') {
        throw detail::bundle_error(sec, "role table must be enclosed in braces");
      }
      RoleTable roles;
      for (const auto& entry : detail::split_top(table.substr(1, table.size() - 2), ';')) {
        auto colon = entry.find(':');
        if (colon == std::string::npos) throw detail::bundle_error(sec, "expected `role: assertion`");
        roles[detail::trim(entry.substr(0, colon))] = parse_assertion(entry.substr(colon + 1), opts);
      }
      b.gamma[shared] = roles;
    } else if (sec == "delta") {
      auto close = body.find(']');
      if (close == std::string::npos || close + 1 >= body.size() || body[close + 1] != ':') {
        throw detail::bundle_error(sec, "expected `s[p]: assertion`");
      }
      SessionRole at = detail::parse_at(body.substr(0, close + 1), sec);
      std::string text = body.substr(close + 2);
      try {
        b.delta[at] = parse_assertion(text, opts);
      } catch (const Error& assertion_error) {
        try {
          b.delta_formulas.push_back({at, parse_formula(text, opts)});
        } catch (const Error&) {
          throw assertion_error;
        }
      }
    } else if (sec == "sigma") {
      VirtualState s;
      for (const auto& item : detail::split_top(body, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw detail::bundle_error(sec, "expected `@x = value`");
        s[detail::strip_state_name(item.substr(0, eq), sec)] = detail::constant(item.substr(eq + 1), sec);
      }
      b.sigma = s;
    }
  }
  return b;
}

/// `@x = 5, @y = true`
inline VirtualState parse_state(std::string_view src) {
  VirtualState s;
  for (const auto& item : detail::split_top(src, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("kernel.syntax", "expected `@x = value`, found `" + item + "`");
    s[detail::strip_state_name(item.substr(0, eq), "state")] = detail::constant(item.substr(eq + 1), "state");
  }
  return s;
}

}  // namespace mpsa
