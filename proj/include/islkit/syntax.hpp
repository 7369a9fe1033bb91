#pragma once

// Parsing, printing and structural analysis of formulas.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "islkit/formula.hpp"

namespace islkit {

enum class LanguageMode { arrow, box, arrow_fp };

inline std::string_view to_string(LanguageMode m) {
  switch (m) {
    case LanguageMode::arrow: return "arrow";
    case LanguageMode::box: return "box";
    case LanguageMode::arrow_fp: return "arrow-fp";
  }
  return "?";
}

/// Finite, duplicate-free, sorted set of variable names.
using VariableSet = std::set<std::string>;

class parse_error : public error {
 public:
  parse_error(const std::string& msg, std::size_t pos)
      : error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

class mode_error : public error {
 public:
  using error::error;
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

enum class Tok { Var, Top, Bot, Fix, Star, Tilde, Hash, And, Or, Imp, Arrow, Iff, ArrowIff, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

inline bool is_keyword(std::string_view s) { return s == "top" || s == "bot" || s == "fix"; }

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    auto starts = [&](std::string_view t) { return s.substr(i, t.size()) == t; };
    if (std::islower(static_cast<unsigned char>(c))) {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      std::string word(s.substr(start, i - start));
      Tok k = Tok::Var;
      if (word == "top") k = Tok::Top;
      else if (word == "bot") k = Tok::Bot;
      else if (word == "fix") k = Tok::Fix;
      out.push_back({k, std::move(word), start});
      continue;
    }
    if (starts("<~>")) { out.push_back({Tok::ArrowIff, "<~>", start}); i += 3; continue; }
    if (starts("<->")) { out.push_back({Tok::Iff, "<->", start}); i += 3; continue; }
    if (starts("~>")) { out.push_back({Tok::Arrow, "~>", start}); i += 2; continue; }
    if (starts("->")) { out.push_back({Tok::Imp, "->", start}); i += 2; continue; }
    switch (c) {
      case '~': out.push_back({Tok::Tilde, "~", start}); break;
      case '#': out.push_back({Tok::Hash, "#", start}); break;
      case '&': out.push_back({Tok::And, "&", start}); break;
      case '|': out.push_back({Tok::Or, "|", start}); break;
      case '*': out.push_back({Tok::Star, "*", start}); break;
      case '(': out.push_back({Tok::LParen, "(", start}); break;
      case ')': out.push_back({Tok::RParen, ")", start}); break;
      default: throw parse_error(std::string("unexpected character '") + c + "'", start);
    }
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, LanguageMode mode) : toks_(tokenize(text)), mode_(mode) {}

  Formula parse_all() {
    Formula f = parse_iff();
    if (peek().kind != Tok::End) throw parse_error("unexpected '" + peek().text + "'", peek().pos);
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  void expect(Tok k, std::string_view what) {
    if (peek().kind != k) throw parse_error("expected " + std::string(what), peek().pos);
    ++pos_;
  }

  // <-> and <~> : non-associative, lowest precedence.
  Formula parse_iff() {
    Formula lhs = parse_imp();
    if (peek().kind == Tok::Iff || peek().kind == Tok::ArrowIff) {
      const Token op = take();
      if (op.kind == Tok::ArrowIff) require_arrow(op.pos);
      Formula rhs = parse_imp();
      if (peek().kind == Tok::Iff || peek().kind == Tok::ArrowIff)
        throw parse_error("'<->' and '<~>' are non-associative", peek().pos);
      return op.kind == Tok::Iff ? Formula::iff(lhs, rhs) : Formula::arrow_iff(lhs, rhs);
    }
    return lhs;
  }

  // -> and ~> : shared level, right associative.
  Formula parse_imp() {
    Formula lhs = parse_or();
    if (peek().kind == Tok::Imp || peek().kind == Tok::Arrow) {
      const Token op = take();
      if (op.kind == Tok::Arrow) require_arrow(op.pos);
      Formula rhs = parse_imp();
      return op.kind == Tok::Imp ? Formula::imp(lhs, rhs) : Formula::arrow(lhs, rhs);
    }
    return lhs;
  }

  Formula parse_or() {
    Formula acc = parse_and();
    while (peek().kind == Tok::Or) {
      take();
      acc = Formula::disj(acc, parse_and());
    }
    return acc;
  }

  Formula parse_and() {
    Formula acc = parse_prefix();
    while (peek().kind == Tok::And) {
      take();
      acc = Formula::conj(acc, parse_prefix());
    }
    return acc;
  }

  Formula parse_prefix() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Tilde: take(); return Formula::neg(parse_prefix());
      case Tok::Hash: {
        take();
        Formula body = parse_prefix();
        return mode_ == LanguageMode::box ? Formula::box(body) : Formula::lbox(body);
      }
      default: return parse_atom();
    }
  }

  Formula parse_atom() {
    const Token t = take();
    switch (t.kind) {
      case Tok::Var: return Formula::var(t.text);
      case Tok::Top: return Formula::top();
      case Tok::Bot: return Formula::bot();
      case Tok::Star:
        if (mode_ != LanguageMode::arrow_fp) throw mode_error("'*' is only legal in arrow-fp mode");
        if (fix_depth_ == 0) throw parse_error("'*' outside of fix(...)", t.pos);
        return Formula::star();
      case Tok::Fix: {
        if (mode_ != LanguageMode::arrow_fp) throw mode_error("fix(...) is only legal in arrow-fp mode");
        expect(Tok::LParen, "'(' after fix");
        ++fix_depth_;
        Formula body = parse_iff();
        --fix_depth_;
        expect(Tok::RParen, "')'");
        return Formula::fix(body);
      }
      case Tok::LParen: {
        Formula f = parse_iff();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::End: throw parse_error("unexpected end of input", t.pos);
      default: throw parse_error("unexpected '" + t.text + "'", t.pos);
    }
  }

  void require_arrow(std::size_t pos) {
    if (mode_ == LanguageMode::box)
      throw mode_error("Lewis arrow is illegal in box mode (position " + std::to_string(pos) + ")");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  LanguageMode mode_;
  int fix_depth_ = 0;
};

}  // namespace detail

/// True iff `f` uses only constructors legal in `mode`.
inline bool legal_in(const Formula& f, LanguageMode mode) {
  switch (mode) {
    case LanguageMode::arrow: return !f.has_box() && !f.has_fix() && !f.has_star();
    case LanguageMode::box: return !f.has_arrow() && !f.has_fix() && !f.has_star();
    case LanguageMode::arrow_fp: return !f.has_box();
  }
  return false;
}

inline void require_mode(const Formula& f, LanguageMode mode) {
  if (!legal_in(f, mode)) throw mode_error("formula is not legal in " + std::string(to_string(mode)) + " mode");
}

/// Checks the fixpoint grammar: every `*` is bound by its nearest enclosing
/// fix and lies inside an arrow below that binder.
inline bool fixpoint_grammar_ok(const Formula& f) {
  // state: inside_fix, guarded since nearest fix
  std::function<bool(const Formula&, bool, bool)> go = [&](const Formula& g, bool in_fix, bool guarded) -> bool {
    switch (g.kind()) {
      case Kind::Star: return in_fix && guarded;
      case Kind::Fix: return go(g.body(), true, false);
      case Kind::Arrow:
        return go(g.lhs(), in_fix, true) && go(g.rhs(), in_fix, true);
      case Kind::Box: return go(g.body(), in_fix, true);
      default:
        if (is_binary(g.kind())) return go(g.lhs(), in_fix, guarded) && go(g.rhs(), in_fix, guarded);
        return true;
    }
  };
  return go(f, false, false);
}

/// Parses the ASCII grammar. Sugars are expanded on the fly.
inline Formula parse(std::string_view text, LanguageMode mode) {
  detail::Parser p(text, mode);
  Formula f = p.parse_all();
  if (mode == LanguageMode::arrow_fp && !fixpoint_grammar_ok(f))
    throw mode_error("'*' must occur under a Lewis arrow inside its fix(...)");
  return f;
}

// ---------------------------------------------------------------------------
// Rendering

namespace detail {

// Precedence levels: 4 prefix/atom, 3 &, 2 |, 1 -> ~>.
inline int prec(const Formula& f, LanguageMode mode) {
  switch (f.kind()) {
    case Kind::And: return 3;
    case Kind::Or: return 2;
    case Kind::Imp: return f.rhs().is(Kind::Bot) ? 4 : 1;
    case Kind::Arrow: return (mode != LanguageMode::box && f.lhs().is(Kind::Top)) ? 4 : 1;
    default: return 4;
  }
}

inline void render_to(std::ostream& os, const Formula& f, LanguageMode mode) {
  auto wrap = [&](const Formula& g, bool paren) {
    if (paren) os << '(';
    render_to(os, g, mode);
    if (paren) os << ')';
  };
  switch (f.kind()) {
    case Kind::Bot: os << "bot"; return;
    case Kind::Top: os << "top"; return;
    case Kind::Var: os << f.name(); return;
    case Kind::Star: os << '*'; return;
    case Kind::Fix: os << "fix("; render_to(os, f.body(), mode); os << ')'; return;
    case Kind::Box: os << '#'; wrap(f.body(), prec(f.body(), mode) < 4); return;
    case Kind::And:
      wrap(f.lhs(), prec(f.lhs(), mode) < 3);
      os << " & ";
      wrap(f.rhs(), prec(f.rhs(), mode) <= 3);
      return;
    case Kind::Or:
      wrap(f.lhs(), prec(f.lhs(), mode) < 2);
      os << " | ";
      wrap(f.rhs(), prec(f.rhs(), mode) <= 2);
      return;
    case Kind::Imp:
      if (f.rhs().is(Kind::Bot)) {
        os << '~';
        wrap(f.lhs(), prec(f.lhs(), mode) < 4);
        return;
      }
      wrap(f.lhs(), prec(f.lhs(), mode) <= 1);
      os << " -> ";
      wrap(f.rhs(), prec(f.rhs(), mode) < 1);
      return;
    case Kind::Arrow:
      if (mode != LanguageMode::box && f.lhs().is(Kind::Top)) {
        os << '#';
        wrap(f.rhs(), prec(f.rhs(), mode) < 4);
        return;
      }
      wrap(f.lhs(), prec(f.lhs(), mode) <= 1);
      os << " ~> ";
      wrap(f.rhs(), prec(f.rhs(), mode) < 1);
      return;
  }
}

}  // namespace detail

/// Prints with minimal parentheses; `top ~> a` is shown as `#a` in the arrow
/// languages and `a -> bot` as `~a`.
inline std::string render(const Formula& f, LanguageMode mode) {
  require_mode(f, mode);
  std::ostringstream os;
  detail::render_to(os, f, mode);
  return os.str();
}

/// Renders without a mode check, guessing the language from the constructors.
inline std::string show(const Formula& f) {
  std::ostringstream os;
  detail::render_to(os, f, f.has_box() ? LanguageMode::box : LanguageMode::arrow_fp);
  return os.str();
}

// ---------------------------------------------------------------------------
// Structural analysis

inline void collect_vars(const Formula& f, VariableSet& out) {
  if (!f.has_var()) return;
  if (f.is(Kind::Var)) {
    out.insert(f.name());
    return;
  }
  if (is_binary(f.kind())) {
    collect_vars(f.lhs(), out);
    collect_vars(f.rhs(), out);
  } else if (is_unary(f.kind())) {
    collect_vars(f.body(), out);
  }
}

inline VariableSet variables(const Formula& f) {
  VariableSet out;
  collect_vars(f, out);
  return out;
}

struct Classification {
  bool closed = false;
  bool modalized_in_v = false;
  bool semipositive_in_v = false;
};

/// `v` is modalized when every occurrence sits under an arrow or box, and
/// semi-positive when every unguarded occurrence is positive.
inline Classification classify(const Formula& f, const std::string& v = {}) {
  Classification c;
  c.closed = !f.has_var();
  if (v.empty()) return c;
  bool modal = true;
  bool semipos = true;
  std::function<void(const Formula&, bool, bool)> go = [&](const Formula& g, bool guarded, bool positive) {
    if (!g.has_var()) return;
    switch (g.kind()) {
      case Kind::Var:
        if (g.name() == v && !guarded) {
          modal = false;
          if (!positive) semipos = false;
        }
        return;
      case Kind::Arrow:
      case Kind::Box:
        return;  // everything below is guarded
      case Kind::Imp:
        go(g.lhs(), guarded, !positive);
        go(g.rhs(), guarded, positive);
        return;
      case Kind::And:
      case Kind::Or:
        go(g.lhs(), guarded, positive);
        go(g.rhs(), guarded, positive);
        return;
      case Kind::Fix:
        go(g.body(), guarded, positive);
        return;
      default: return;
    }
  };
  go(f, false, true);
  c.modalized_in_v = modal;
  c.semipositive_in_v = semipos;
  return c;
}

enum class ClosureKind { sub, subplus, adequate, adequateplus };

inline std::string_view to_string(ClosureKind k) {
  switch (k) {
    case ClosureKind::sub: return "sub";
    case ClosureKind::subplus: return "subplus";
    case ClosureKind::adequate: return "adequate";
    case ClosureKind::adequateplus: return "adequateplus";
  }
  return "?";
}

/// (Plus-)subformula closure, optionally with `bot` and `top` added. The
/// plus variant also counts `a -> b` as a part of `a ~> b`. Ordered by size,
/// then canonically, so subformulas precede the formulas containing them.
inline std::vector<Formula> closure(const std::vector<Formula>& fs, ClosureKind kind) {
  const bool plus = kind == ClosureKind::subplus || kind == ClosureKind::adequateplus;
  std::unordered_set<Formula> seen;
  std::vector<Formula> stack(fs.begin(), fs.end());
  if (kind == ClosureKind::adequate || kind == ClosureKind::adequateplus) {
    stack.push_back(Formula::bot());
    stack.push_back(Formula::top());
  }
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g).second) continue;
    if (is_binary(g.kind())) {
      stack.push_back(g.lhs());
      stack.push_back(g.rhs());
      if (plus && g.is(Kind::Arrow)) stack.push_back(Formula::imp(g.lhs(), g.rhs()));
    } else if (is_unary(g.kind())) {
      stack.push_back(g.body());
    }
  }
  std::vector<Formula> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end(), BySizeThenCanonical{});
  return out;
}

inline std::vector<Formula> closure(const Formula& f, ClosureKind kind) {
  return closure(std::vector<Formula>{f}, kind);
}

/// Implication/arrow nesting depth; boxes count as `top ~> .`.
inline std::size_t complexity(const Formula& f) {
  switch (f.kind()) {
    case Kind::Bot:
    case Kind::Top:
    case Kind::Var: return 0;
    case Kind::And:
    case Kind::Or: return std::max(complexity(f.lhs()), complexity(f.rhs()));
    case Kind::Imp:
    case Kind::Arrow: return std::max(complexity(f.lhs()), complexity(f.rhs())) + 1;
    case Kind::Box: return complexity(f.body()) + 1;
    case Kind::Star:
    case Kind::Fix: throw error("complexity is undefined for fixpoint syntax");
  }
  return 0;
}

enum class CountMode { arrow, arrowplus, box };

/// Atom, implication and modal counts over Sub (or Sub+) of a formula set.
struct Counts {
  std::size_t atoms = 0;
  std::size_t implications = 0;
  std::size_t modal = 0;  // Lewis implications, or boxed formulas in box mode
  std::size_t nu() const { return atoms + implications + modal; }
};

inline Counts counts(const std::vector<Formula>& fs, CountMode mode) {
  const auto parts = closure(fs, mode == CountMode::arrowplus ? ClosureKind::subplus : ClosureKind::sub);
  Counts c;
  for (const Formula& g : parts) {
    switch (g.kind()) {
      case Kind::Var: ++c.atoms; break;
      case Kind::Imp: ++c.implications; break;
      case Kind::Arrow: ++c.modal; break;
      case Kind::Box: ++c.modal; break;
      default: break;
    }
  }
  return c;
}

inline Counts counts(const Formula& f, CountMode mode) { return counts(std::vector<Formula>{f}, mode); }

inline std::size_t count_nu(const Formula& f, CountMode mode) { return counts(f, mode).nu(); }

/// Number of variables, implications and Lewis implications in a set; the
/// bound on Henkin depth.
inline std::size_t nu_of_set(const std::vector<Formula>& xs) {
  std::size_t n = 0;
  for (const Formula& g : xs)
    if (g.is(Kind::Var) || g.is(Kind::Imp) || g.is(Kind::Arrow) || g.is(Kind::Box)) ++n;
  return n;
}

/// Replaces every occurrence of variable `v` by `g`. `*` is never a target.
inline Formula substitute(const Formula& f, const std::string& v, const Formula& g) {
  if (v == "*") throw error("cannot substitute for the bound variable '*'");
  std::unordered_map<Formula, Formula> memo;
  std::function<Formula(const Formula&)> go = [&](const Formula& h) -> Formula {
    if (!h.has_var()) return h;
    if (h.is(Kind::Var)) return h.name() == v ? g : h;
    if (auto it = memo.find(h); it != memo.end()) return it->second;
    Formula r = is_binary(h.kind()) ? Formula::make_binary(h.kind(), go(h.lhs()), go(h.rhs()))
                                    : Formula::make_unary(h.kind(), go(h.body()));
    memo.emplace(h, r);
    return r;
  };
  return go(f);
}

/// Replaces the bound `*` of the outermost binder level by `g` (used on fix
/// bodies; nested fix binders keep their own `*`).
inline Formula substitute_star(const Formula& body, const Formula& g) {
  std::function<Formula(const Formula&)> go = [&](const Formula& h) -> Formula {
    if (!h.has_star()) return h;
    switch (h.kind()) {
      case Kind::Star: return g;
      case Kind::Fix: return h;
      default:
        return is_binary(h.kind()) ? Formula::make_binary(h.kind(), go(h.lhs()), go(h.rhs()))
                                   : Formula::make_unary(h.kind(), go(h.body()));
    }
  };
  return go(body);
}

/// Rewrites every `#a` node into `top ~> a`.
inline Formula desugar_box(const Formula& f) {
  if (!f.has_box()) return f;
  if (f.is(Kind::Box)) return Formula::lbox(desugar_box(f.body()));
  if (is_binary(f.kind())) return Formula::make_binary(f.kind(), desugar_box(f.lhs()), desugar_box(f.rhs()));
  return Formula::make_unary(f.kind(), desugar_box(f.body()));
}

/// Lexicographically first name `prefix + k` not occurring in `used`.
inline std::string fresh_variable(const VariableSet& used, const std::string& prefix = "q_") {
  for (std::size_t k = 0;; ++k) {
    std::string cand = prefix + std::to_string(k);
    if (!used.count(cand)) return cand;
  }
}

}  // namespace islkit
