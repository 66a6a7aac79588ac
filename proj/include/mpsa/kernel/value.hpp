#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mpsa {

/// Base exception for every module. `code()` is module-qualified,
/// e.g. "kernel.syntax" or "shuffle.names".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

using Value = std::variant<std::int64_t, bool>;

inline bool is_bool(const Value& v) { return std::holds_alternative<bool>(v); }
inline bool is_int(const Value& v) { return std::holds_alternative<std::int64_t>(v); }

inline std::int64_t as_int(const Value& v) {
  if (!is_int(v)) throw Error("predicates.sort", "expected an integer value");
  return std::get<std::int64_t>(v);
}

inline bool as_bool(const Value& v) {
  if (!is_bool(v)) throw Error("predicates.sort", "expected a boolean value");
  return std::get<bool>(v);
}

inline std::string to_string(const Value& v) {
  if (is_bool(v)) return std::get<bool>(v) ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(v));
}

/// Message and state sorts. `Session` only appears under formula-level
/// quantifiers ranging over session names.
enum class Sort { Int, Nat, Bool, Session };

inline std::string to_string(Sort s) {
  switch (s) {
    case Sort::Int: return "Int";
    case Sort::Nat: return "Nat";
    case Sort::Bool: return "Bool";
    case Sort::Session: return "Sess";
  }
  return "?";
}

inline bool is_numeric(Sort s) { return s == Sort::Int || s == Sort::Nat; }

inline constexpr int kDefaultSortBound = 32;

/// A finite enumeration domain: either the booleans or an inclusive
/// integer range.
struct Domain {
  bool boolean = false;
  std::int64_t lo = 0;
  std::int64_t hi = -1;

  static Domain booleans() { return Domain{true, 0, 1}; }
  static Domain range(std::int64_t lo, std::int64_t hi) { return Domain{false, lo, hi}; }

  std::size_t size() const {
    if (boolean) return 2;
    return hi < lo ? 0 : static_cast<std::size_t>(hi - lo + 1);
  }

  bool contains(const Value& v) const {
    if (boolean) return is_bool(v);
    return is_int(v) && as_int(v) >= lo && as_int(v) <= hi;
  }

  std::vector<Value> values() const {
    std::vector<Value> out;
    if (boolean) {
      out = {Value{false}, Value{true}};
      return out;
    }
    for (auto i = lo; i <= hi; ++i) out.emplace_back(i);
    return out;
  }

  bool operator==(const Domain&) const = default;
};

/// Enumeration domain of a sort under bound B: Nat is [0, B-1], Int is
/// [-B/2, B-1-B/2], Bool is {false, true}.
inline Domain domain_of(Sort s, int bound = kDefaultSortBound) {
  if (bound <= 0) throw Error("kernel.sort", "sort bound must be positive");
  switch (s) {
    case Sort::Nat: return Domain::range(0, bound - 1);
    case Sort::Int: return Domain::range(-(bound / 2), bound - 1 - bound / 2);
    case Sort::Bool: return Domain::booleans();
    case Sort::Session: break;
  }
  throw Error("satisfaction.domain", "sort " + to_string(s) + " has no finite value domain");
}

}  // namespace mpsa
