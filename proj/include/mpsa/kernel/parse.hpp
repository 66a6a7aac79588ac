#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpsa/kernel/ast.hpp"
#include "mpsa/kernel/print.hpp"

namespace mpsa {

/// Sorts of the state variables a text may mention. Undeclared state
/// variables default to Int.
struct ParseOptions {
  std::map<std::string, Sort> state_sorts;
};

// ---------------------------------------------------------------------------
// Sort inference

/// Coarse sort used while checking: Nat and Int are both numeric, and a
/// variable received without annotation is compatible with anything.
enum class ExprSort { Num, Bool, Any };

inline ExprSort coarse(Sort s) { return s == Sort::Bool ? ExprSort::Bool : ExprSort::Num; }

using SortScope = std::map<std::string, ExprSort>;

/// Infers the sort of `e`, throwing kernel.sort on a mismatch and
/// kernel.unbound on a message variable missing from `scope`.
inline ExprSort infer_sort(const Expr& e, const SortScope& scope, const std::map<std::string, Sort>& state_sorts) {
  auto mismatch = [&](const std::string& why) {
    throw Error("kernel.sort", why + " in `" + print_expr(e) + "`");
  };
  auto want = [&](ExprSort got, ExprSort need, const char* what) {
    if (got != ExprSort::Any && got != need) mismatch(std::string("expected ") + what);
  };
  return std::visit(
      [&](const auto& n) -> ExprSort {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ELit>) {
          return is_bool(n.value) ? ExprSort::Bool : ExprSort::Num;
        } else if constexpr (std::is_same_v<T, EVar>) {
          auto it = scope.find(n.name);
          if (it == scope.end()) throw Error("kernel.unbound", "unbound variable `" + n.name + "`");
          return it->second;
        } else if constexpr (std::is_same_v<T, EState>) {
          auto it = state_sorts.find(n.name);
          return it == state_sorts.end() ? ExprSort::Num : coarse(it->second);
        } else if constexpr (std::is_same_v<T, EUnary>) {
          auto a = infer_sort(n.arg, scope, state_sorts);
          if (n.op == UnOp::Not) {
            want(a, ExprSort::Bool, "a boolean operand");
            return ExprSort::Bool;
          }
          want(a, ExprSort::Num, "a numeric operand");
          return ExprSort::Num;
        } else {
          auto l = infer_sort(n.lhs, scope, state_sorts);
          auto r = infer_sort(n.rhs, scope, state_sorts);
          switch (n.op) {
            case BinOp::Add: case BinOp::Sub: case BinOp::Mul:
              want(l, ExprSort::Num, "numeric operands");
              want(r, ExprSort::Num, "numeric operands");
              return ExprSort::Num;
            case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
              want(l, ExprSort::Num, "numeric operands");
              want(r, ExprSort::Num, "numeric operands");
              return ExprSort::Bool;
            case BinOp::Eq: case BinOp::Ne:
              if (l != ExprSort::Any && r != ExprSort::Any && l != r) mismatch("operands of different sorts");
              return ExprSort::Bool;
            case BinOp::And: case BinOp::Or:
              want(l, ExprSort::Bool, "boolean operands");
              want(r, ExprSort::Bool, "boolean operands");
              return ExprSort::Bool;
          }
          return ExprSort::Any;
        }
      },
      e.node().v);
}

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

enum class Tok { Ident, Int, State, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

inline std::vector<Token> lex(std::string_view src) {
  static const char* const kMulti[] = {"/\\", "\\/", "=>", "==", "!=", "<=", ">=", ":=", "::", "++"};
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '@') {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      if (j == i + 1) throw Error("kernel.syntax", std::to_string(line) + ":" + std::to_string(col) + ": `@` must be followed by a name");
      t.kind = Tok::State;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      advance(j - i);
    } else {
      t.kind = Tok::Sym;
      for (const char* m : kMulti) {
        if (src.substr(i, 2) == m) {
          t.text = m;
          break;
        }
      }
      if (t.text.empty()) {
        if (std::string_view("!?{}()[]<>.,;:|+-*~=").find(c) == std::string_view::npos) {
          throw Error("kernel.syntax", std::to_string(line) + ":" + std::to_string(col) + ": unexpected character `" +
                                           std::string(1, c) + "`");
        }
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, ParseOptions opts) : toks_(lex(src)), opts_(std::move(opts)) {}

  // -- token helpers --------------------------------------------------------

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_sym(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Sym && peek(k).text == s; }
  bool is_kw(const char* s, std::size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == s; }

  [[noreturn]] void fail(const std::string& msg, const Token* at = nullptr) const {
    const Token& t = at ? *at : peek();
    std::string near = t.kind == Tok::End ? "end of input" : "`" + (t.kind == Tok::State ? "@" + t.text : t.text) + "`";
    throw Error("kernel.syntax", std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + msg + " near " + near);
  }

  [[noreturn]] void sort_fail(const std::string& msg, const Token& at) const {
    throw Error("kernel.sort", std::to_string(at.line) + ":" + std::to_string(at.col) + ": " + msg);
  }

  void expect(const char* s) {
    if (!is_sym(s)) fail(std::string("expected `") + s + "`");
    ++pos_;
  }
  bool accept(const char* s) {
    if (is_sym(s)) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::string ident(const char* what = "identifier") {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return toks_[pos_++].text;
  }
  /// Roles and labels may be identifiers or numerals.
  std::string name_or_int(const char* what) {
    if (peek().kind != Tok::Ident && peek().kind != Tok::Int) fail(std::string("expected ") + what);
    return toks_[pos_++].text;
  }
  void finish() {
    if (!at_end()) fail("unexpected trailing input");
  }

  Sort sort(bool allow_session = false) {
    const Token& t = peek();
    std::string s = ident("sort");
    if (s == "Int") return Sort::Int;
    if (s == "Nat") return Sort::Nat;
    if (s == "Bool") return Sort::Bool;
    if (s == "Sess" && allow_session) return Sort::Session;
    fail("unknown sort `" + s + "`", &t);
  }

  // -- expressions ----------------------------------------------------------

  // `no_gt` disables a top-level `>`/`>=` inside `<...>` brackets.
  Expr expr(bool no_gt = false) { return expr_or(no_gt); }

  Expr expr_or(bool no_gt) {
    Expr l = expr_and(no_gt);
    while (accept("\\/")) l = Expr::binary(BinOp::Or, l, expr_and(no_gt));
    return l;
  }
  Expr expr_and(bool no_gt) {
    Expr l = expr_not(no_gt);
    while (accept("/\\")) l = Expr::binary(BinOp::And, l, expr_not(no_gt));
    return l;
  }
  Expr expr_not(bool no_gt) {
    if (accept("!")) return Expr::unary(UnOp::Not, expr_not(no_gt));
    return expr_cmp(no_gt);
  }
  Expr expr_cmp(bool no_gt) {
    Expr l = expr_add();
    static const std::pair<const char*, BinOp> kOps[] = {{"<=", BinOp::Le}, {">=", BinOp::Ge}, {"==", BinOp::Eq},
                                                         {"!=", BinOp::Ne}, {"<", BinOp::Lt},  {">", BinOp::Gt}};
    for (auto [s, op] : kOps) {
      if (no_gt && (op == BinOp::Gt || op == BinOp::Ge)) continue;
      if (accept(s)) return Expr::binary(op, l, expr_add());
    }
    return l;
  }
  Expr expr_add() {
    Expr l = expr_mul();
    for (;;) {
      if (accept("+")) {
        l = l + expr_mul();
      } else if (accept("-")) {
        l = l - expr_mul();
      } else {
        return l;
      }
    }
  }
  Expr expr_mul() {
    Expr l = expr_unary();
    while (accept("*")) l = l * expr_unary();
    return l;
  }
  Expr expr_unary() {
    if (accept("-")) return Expr::unary(UnOp::Neg, expr_unary());
    return expr_atom();
  }
  Expr expr_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      ++pos_;
      return Expr::integer(std::stoll(t.text));
    }
    if (t.kind == Tok::State) {
      ++pos_;
      return Expr::state(t.text);
    }
    if (t.kind == Tok::Ident) {
      ++pos_;
      if (t.text == "true") return Expr::boolean(true);
      if (t.text == "false") return Expr::boolean(false);
      return Expr::var(t.text);
    }
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    fail("expected an expression");
  }

  ExprSort check(const Expr& e, const Token& at) {
    try {
      return infer_sort(e, scope_, opts_.state_sorts);
    } catch (const Error& err) {
      throw Error(err.code(), std::to_string(at.line) + ":" + std::to_string(at.col) + ": " +
                                  std::string(err.what()).substr(err.code().size() + 2));
    }
  }
  Expr predicate(bool no_gt = false) {
    const Token& at = peek();
    Expr e = expr(no_gt);
    if (check(e, at) == ExprSort::Num) sort_fail("expected a boolean predicate", at);
    return e;
  }
  Expr value_expr(bool no_gt = false) {
    const Token& at = peek();
    Expr e = expr(no_gt);
    check(e, at);
    return e;
  }

  Update update() {
    Update u;
    if (is_kw("skip")) {
      ++pos_;
      return u;
    }
    std::set<std::string> seen;
    do {
      const Token& at = peek();
      if (at.kind != Tok::State) fail("expected `skip` or a state variable");
      ++pos_;
      if (!seen.insert(at.text).second) fail("state variable assigned twice in one update", &at);
      if (accept("++")) {
        u.assignments.push_back({at.text, Expr::state(at.text) + Expr::integer(1)});
      } else {
        expect(":=");
        Expr rhs = value_expr(true);
        auto target = opts_.state_sorts.count(at.text) ? coarse(opts_.state_sorts.at(at.text)) : ExprSort::Num;
        auto got = infer_sort(rhs, scope_, opts_.state_sorts);
        if (got != ExprSort::Any && got != target) sort_fail("update right-hand side has the wrong sort", at);
        u.assignments.push_back({at.text, rhs});
      }
    } while (accept(","));
    return u;
  }

  // -- scoping ----------------------------------------------------------------

  struct ScopeGuard {
    Parser& p;
    SortScope saved;
    ScopeGuard(Parser& p, const std::string& name, ExprSort s) : p(p), saved(p.scope_) { p.scope_[name] = s; }
    ~ScopeGuard() { p.scope_ = saved; }
  };

  // -- assertions -------------------------------------------------------------

  LocalAssertion assertion() {
    if (is_kw("end")) {
      ++pos_;
      return la::end();
    }
    if (is_kw("mu")) return rec_assertion();
    if ((peek().kind == Tok::Ident || peek().kind == Tok::Int) && (is_sym("!", 1) || is_sym("?", 1))) {
      std::string partner = name_or_int("role");
      bool out = accept("!");
      if (!out) expect("?");
      expect("{");
      std::vector<AssertionBranch> bs;
      std::set<std::string> labels;
      unguarded_.clear();
      do {
        const Token& at = peek();
        auto b = abranch();
        if (!labels.insert(b.label).second) fail("duplicate branch label `" + b.label + "`", &at);
        bs.push_back(std::move(b));
      } while (accept(";"));
      expect("}");
      return out ? la::select(partner, std::move(bs)) : la::branch(partner, std::move(bs));
    }
    if (peek().kind == Tok::Ident && is_sym("(", 1)) {
      const Token& at = peek();
      std::string t = ident();
      if (!rec_vars_.count(t)) fail("unbound recursion variable `" + t + "`", &at);
      if (unguarded_.count(t)) fail("recursion variable `" + t + "` is not guarded by a communication", &at);
      expect("(");
      std::string y = ident();
      expect(":");
      ScopeGuard g(*this, y, rec_vars_.at(t));
      Expr a = predicate();
      expect(")");
      return la::call(t, y, a);
    }
    fail("expected a local assertion");
  }

  AssertionBranch abranch() {
    AssertionBranch b;
    b.label = name_or_int("label");
    expect("(");
    b.var = ident("variable");
    expect(":");
    b.sort = sort();
    expect(")");
    ScopeGuard g(*this, b.var, coarse(b.sort));
    expect("{");
    b.pred = predicate();
    expect("}");
    expect("<");
    b.update = update();
    expect(">");
    expect(".");
    b.cont = assertion();
    return b;
  }

  LocalAssertion rec_assertion() {
    ++pos_;  // mu
    std::string t = ident("recursion variable");
    expect("{");
    std::string y = ident();
    expect(":");
    // The init predicate is checked once the parameter sort is known.
    const Token& pred_at = peek();
    Expr init;
    {
      ScopeGuard g(*this, y, ExprSort::Any);
      init = expr();
    }
    expect("}");
    expect("(");
    std::string x = ident();
    expect(":");
    Sort s = sort();
    expect(")");
    expect(".");
    {
      ScopeGuard g(*this, y, coarse(s));
      if (check(init, pred_at) == ExprSort::Num) sort_fail("expected a boolean predicate", pred_at);
    }
    auto saved_rec = rec_vars_;
    auto saved_unguarded = unguarded_;
    rec_vars_[t] = coarse(s);
    unguarded_.insert(t);
    LocalAssertion body;
    {
      ScopeGuard g(*this, x, coarse(s));
      body = assertion();
    }
    rec_vars_ = saved_rec;
    unguarded_ = saved_unguarded;
    expect(":");
    ScopeGuard g(*this, x, coarse(s));
    Expr inv = predicate();
    return la::rec(t, x, s, y, init, inv, body);
  }

  // -- processes --------------------------------------------------------------

  Process process() {
    Process p = process_unary();
    while (accept("|")) p = proc::par(p, process_unary());
    return p;
  }

  Process process_unary() {
    const Token& t = peek();
    if (t.kind == Tok::Int && t.text == "0") {
      ++pos_;
      return proc::inact();
    }
    if (accept("(")) {
      Process p = process();
      expect(")");
      return p;
    }
    if (is_kw("req") || is_kw("acc")) {
      bool req = is_kw("req");
      ++pos_;
      std::string u = ident("shared name");
      expect("[");
      std::string role = name_or_int("role");
      expect("]");
      expect("(");
      std::string y = ident("session variable");
      expect(")");
      expect(".");
      Process body = process_unary();
      return req ? proc::request(u, role, y, body) : proc::accept(u, role, y, body);
    }
    if (is_kw("mu")) {
      ++pos_;
      std::string name = ident("recursion variable");
      expect("(");
      std::string x = ident();
      expect(":=");
      Expr init = value_expr();
      expect(")");
      expect(".");
      auto saved = proc_rec_;
      proc_rec_.insert(name);
      ScopeGuard g(*this, x, ExprSort::Any);
      Process body = process_unary();
      proc_rec_ = saved;
      return proc::rec(name, x, init, body);
    }
    if (accept("<")) {
      Update u = update();
      expect(">");
      expect(".");
      return proc::pending(u, process_unary());
    }
    if (t.kind == Tok::Ident && is_sym("<", 1)) {
      std::string name = ident();
      if (!proc_rec_.count(name)) fail("unbound process variable `" + name + "`", &t);
      expect("<");
      Expr arg = value_expr(true);
      expect(">");
      return proc::call(name, arg);
    }
    if (t.kind == Tok::Ident && is_sym("[", 1)) {
      std::string k = ident();
      expect("[");
      std::string from = name_or_int("role");
      expect(",");
      std::string to = name_or_int("role");
      expect("]");
      if (accept("!")) {
        expect("{");
        std::vector<GuardedBranch> bs;
        do {
          GuardedBranch b;
          b.guard = predicate();
          expect("::");
          b.label = name_or_int("label");
          expect("<");
          b.payload = value_expr(true);
          expect(">");
          expect("(");
          b.var = ident("variable");
          expect(")");
          ScopeGuard g(*this, b.var, ExprSort::Any);
          expect("<");
          b.update = update();
          expect(">");
          expect(".");
          b.cont = process_unary();
          bs.push_back(std::move(b));
        } while (accept(";"));
        expect("}");
        return proc::select(k, from, to, std::move(bs));
      }
      expect("?");
      expect("{");
      std::vector<InputBranch> bs;
      std::set<std::string> labels;
      do {
        InputBranch b;
        const Token& at = peek();
        b.label = name_or_int("label");
        if (!labels.insert(b.label).second) fail("duplicate branch label `" + b.label + "`", &at);
        expect("(");
        b.var = ident("variable");
        if (accept(":")) b.sort = sort();
        expect(")");
        ScopeGuard g(*this, b.var, b.sort ? coarse(*b.sort) : ExprSort::Any);
        expect("<");
        b.update = update();
        expect(">");
        expect(".");
        b.cont = process_unary();
        bs.push_back(std::move(b));
      } while (accept(";"));
      expect("}");
      return proc::branch(k, from, to, std::move(bs));
    }
    fail("expected a process");
  }

  // -- formulae ---------------------------------------------------------------

  Formula formula() {
    const Token& at = peek();
    Formula l = formula_and();
    if (accept("=>")) {
      if (!is_hypothesis(l)) {
        throw Error("kernel.positivity", std::to_string(at.line) + ":" + std::to_string(at.col) +
                                             ": implication antecedent must be a predicate");
      }
      return fml::implies(l, formula());
    }
    return l;
  }

  static bool is_hypothesis(const Formula& f) {
    return std::visit(
        [](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, FTrue> || std::is_same_v<T, FPred>) return true;
          else if constexpr (std::is_same_v<T, FAnd>) return is_hypothesis(n.lhs) && is_hypothesis(n.rhs);
          else if constexpr (std::is_same_v<T, FImplies>) return is_hypothesis(n.hyp) && is_hypothesis(n.concl);
          else return false;
        },
        f.node().v);
  }

  Formula formula_and() {
    Formula l = formula_unary();
    if (accept("/\\")) return fml::conj(l, formula_and());
    return l;
  }

  Formula formula_unary() {
    if (is_kw("forall")) {
      ++pos_;
      std::string x = ident("variable");
      expect(":");
      Sort s = sort(true);
      expect(".");
      if (s == Sort::Session) {
        auto saved = sessions_;
        sessions_.insert(x);
        Formula body = formula();
        sessions_ = saved;
        return fml::forall(x, s, body);
      }
      ScopeGuard g(*this, x, coarse(s));
      return fml::forall(x, s, formula());
    }
    if (is_kw("mu")) {
      ++pos_;
      std::string x = ident("recursion variable");
      expect(".");
      auto saved = mu_vars_;
      mu_vars_.insert(x);
      Formula body = formula();
      mu_vars_ = saved;
      return fml::mu(x, body);
    }
    if (accept("[")) {
      auto [a, binder] = action_pattern();
      expect("]");
      if (binder) {
        ScopeGuard g(*this, *binder, ExprSort::Any);
        return fml::must(a, formula_unary());
      }
      return fml::must(a, formula_unary());
    }
    // A predicate, `true`, or a recursion variable; otherwise a bracketed
    // formula.
    std::size_t save = pos_;
    const Token& at = peek();
    try {
      Expr e = expr_not(false);
      if (auto* v = std::get_if<EVar>(&e.node().v); v && mu_vars_.count(v->name)) return fml::var(v->name);
      if (check(e, at) == ExprSort::Num) sort_fail("expected a boolean predicate", at);
      return fml::pred(e);
    } catch (const Error& err) {
      bool bracket = toks_[save].kind == Tok::Sym && toks_[save].text == "(";
      if (err.code() != "kernel.syntax" || !bracket) throw;
      pos_ = save;
    }
    expect("(");
    Formula f = formula();
    expect(")");
    return f;
  }

  std::pair<Action, std::optional<std::string>> action_pattern() {
    if (accept("<")) {
      Update u = update();
      expect(">");
      return {act::update(u), std::nullopt};
    }
    if (accept("~")) {
      std::string c = ident("channel");
      expect("<");
      auto [v, binder] = pattern_value(true);
      expect(">");
      return {act::chan_out(c, v), binder};
    }
    if (peek().kind == Tok::Int) return {act::label(toks_[pos_++].text), std::nullopt};
    std::string n = ident("action");
    if (accept("[")) {
      std::string from = name_or_int("role");
      expect(",");
      std::string to = name_or_int("role");
      expect("]");
      bool out = accept("!");
      if (!out) expect("?");
      std::optional<std::string> label;
      if (!is_sym("(")) label = name_or_int("label");
      expect("(");
      auto [v, binder] = pattern_value(false);
      expect(")");
      CommAction c{out ? Direction::Out : Direction::In, n, from, to, label, v};
      return {Action{c}, binder};
    }
    if (accept("(")) {
      std::string s = ident("session");
      expect("[");
      std::string role = name_or_int("role");
      expect("]");
      expect(")");
      return {act::accept(n, s, role), std::nullopt};
    }
    return {act::label(n), std::nullopt};
  }

  /// The value slot of a pattern; a fresh identifier binds in the body.
  std::pair<Expr, std::optional<std::string>> pattern_value(bool no_gt) {
    if (peek().kind == Tok::Ident && !scope_.count(peek().text) && peek().text != "true" && peek().text != "false" &&
        (is_sym(")", 1) || is_sym(">", 1))) {
      std::string x = ident();
      return {Expr::var(x), x};
    }
    return {value_expr(no_gt), std::nullopt};
  }

  const ParseOptions& options() const { return opts_; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions opts_;
  SortScope scope_;
  std::map<std::string, ExprSort> rec_vars_;
  std::set<std::string> unguarded_;
  std::set<std::string> proc_rec_;
  std::set<std::string> mu_vars_;
  std::set<std::string> sessions_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Well-formedness of formulae

/// Throws kernel.positivity unless every implication antecedent is a
/// predicate and every mu-variable is bound and occurs under a modality.
inline void check_formula(const Formula& f) {
  std::function<void(const Formula&, std::map<std::string, bool>&)> go =
      [&](const Formula& g, std::map<std::string, bool>& guarded) {
        std::visit(
            [&](const auto& n) {
              using T = std::decay_t<decltype(n)>;
              if constexpr (std::is_same_v<T, FAnd>) {
                go(n.lhs, guarded);
                go(n.rhs, guarded);
              } else if constexpr (std::is_same_v<T, FImplies>) {
                if (!detail::Parser::is_hypothesis(n.hyp)) {
                  throw Error("kernel.positivity", "implication antecedent must be a predicate");
                }
                go(n.concl, guarded);
              } else if constexpr (std::is_same_v<T, FMust>) {
                auto inner = guarded;
                for (auto& [k, v] : inner) v = true;
                go(n.body, inner);
              } else if constexpr (std::is_same_v<T, FForall>) {
                go(n.body, guarded);
              } else if constexpr (std::is_same_v<T, FMu>) {
                auto inner = guarded;
                inner[n.name] = false;
                go(n.body, inner);
              } else if constexpr (std::is_same_v<T, FVar>) {
                auto it = guarded.find(n.name);
                if (it == guarded.end()) throw Error("kernel.unbound", "unbound recursion variable `" + n.name + "`");
                if (!it->second) throw Error("kernel.positivity", "recursion variable `" + n.name + "` is unguarded");
              }
            },
            g.node().v);
      };
  std::map<std::string, bool> guarded;
  go(f, guarded);
}

inline bool is_positive(const Formula& f) {
  try {
    check_formula(f);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// Entry points

inline LocalAssertion parse_assertion(std::string_view src, const ParseOptions& opts = {}) {
  detail::Parser p(src, opts);
  auto a = p.assertion();
  p.finish();
  return a;
}

inline Process parse_process(std::string_view src, const ParseOptions& opts = {}) {
  detail::Parser p(src, opts);
  auto a = p.process();
  p.finish();
  return a;
}

inline Formula parse_formula(std::string_view src, const ParseOptions& opts = {}) {
  detail::Parser p(src, opts);
  auto f = p.formula();
  p.finish();
  check_formula(f);
  return f;
}

inline Expr parse_expr(std::string_view src, const std::map<std::string, Sort>& vars = {},
                       const ParseOptions& opts = {}) {
  detail::Parser p(src, opts);
  auto e = p.expr();
  p.finish();
  SortScope scope;
  for (const auto& [k, s] : vars) scope[k] = coarse(s);
  infer_sort(e, scope, opts.state_sorts);
  return e;
}

inline Update parse_update(std::string_view src, const ParseOptions& opts = {}) {
  detail::Parser p(src, opts);
  auto u = p.update();
  p.finish();
  return u;
}

}  // namespace mpsa
