#pragma once

// Compositional translations between the arrow and box languages, and
// elimination of the fixpoint binder.

#include <string>
#include <unordered_map>

#include "islkit/formula.hpp"
#include "islkit/syntax.hpp"

namespace islkit {

/// A translation commuting with variables and the non-modal connectives. The
/// modal connective of the source (arrow or box) is sent to `clause`, a
/// formula over the placeholders p0 (and p1 for the arrow).
struct TranslationMap {
  std::string name;
  LanguageMode source;
  LanguageMode target;
  Formula clause;
  bool identity = false;
};

namespace maps {

inline Formula p0() { return Formula::var("p0"); }
inline Formula p1() { return Formula::var("p1"); }

inline TranslationMap id() { return {"id", LanguageMode::arrow, LanguageMode::arrow, Formula::arrow(p0(), p1()), true}; }
inline TranslationMap triv() {
  return {"triv", LanguageMode::arrow, LanguageMode::arrow, Formula::lbox(Formula::imp(p0(), p1()))};
}
inline TranslationMap lb() { return {"lb", LanguageMode::arrow, LanguageMode::box, Formula::box(Formula::imp(p0(), p1()))}; }
inline TranslationMap bl() { return {"bl", LanguageMode::box, LanguageMode::arrow, Formula::lbox(p0())}; }
/// Same clause as bl; read as a map into the weaker arrow logic.
inline TranslationMap red() { return {"red", LanguageMode::box, LanguageMode::arrow, Formula::lbox(p0())}; }

}  // namespace maps

namespace detail {

inline Formula instantiate_clause(const Formula& clause, const Formula& a, const Formula& b) {
  std::unordered_map<Formula, Formula> memo;
  std::function<Formula(const Formula&)> go = [&](const Formula& h) -> Formula {
    if (!h.has_var()) return h;
    if (h.is(Kind::Var)) {
      if (h.name() == "p0") return a;
      if (h.name() == "p1") return b;
      return h;
    }
    if (auto it = memo.find(h); it != memo.end()) return it->second;
    Formula r = is_binary(h.kind()) ? Formula::make_binary(h.kind(), go(h.lhs()), go(h.rhs()))
                                    : Formula::make_unary(h.kind(), go(h.body()));
    memo.emplace(h, r);
    return r;
  };
  return go(clause);
}

}  // namespace detail

inline Formula apply_translation(const Formula& f, const TranslationMap& t) {
  require_mode(f, t.source);
  if (t.identity) return f;
  std::unordered_map<Formula, Formula> memo;
  std::function<Formula(const Formula&)> go = [&](const Formula& h) -> Formula {
    if (h.is_atom()) return h;
    if (auto it = memo.find(h); it != memo.end()) return it->second;
    Formula r;
    if (h.is(Kind::Arrow) && t.source != LanguageMode::box) {
      r = detail::instantiate_clause(t.clause, go(h.lhs()), go(h.rhs()));
    } else if (h.is(Kind::Box) && t.source == LanguageMode::box) {
      r = detail::instantiate_clause(t.clause, go(h.body()), Formula::top());
    } else if (is_binary(h.kind())) {
      r = Formula::make_binary(h.kind(), go(h.lhs()), go(h.rhs()));
    } else {
      r = Formula::make_unary(h.kind(), go(h.body()));
    }
    memo.emplace(h, r);
    return r;
  };
  return go(f);
}

/// `second` after `first`: the clause of `first` pushed through `second`.
inline TranslationMap compose(const TranslationMap& first, const TranslationMap& second) {
  if (first.target != second.source && !(first.target == LanguageMode::arrow && second.source == LanguageMode::arrow_fp))
    throw mode_error("cannot compose " + first.name + " with " + second.name + ": language mismatch");
  if (first.identity) return {second.name, first.source, second.target, second.clause, second.identity};
  if (second.identity) return {first.name, first.source, second.target, first.clause, first.identity};
  return {second.name + "." + first.name, first.source, second.target, apply_translation(first.clause, second)};
}

/// Looks a map up by name. A dotted name such as "triv.lb" is read as in
/// the usual superscript notation, so "triv.lb" sends # to #(top -> p0)
/// rendered in the arrow language: the box image first, then triv.
inline TranslationMap translation_by_name(const std::string& name) {
  if (name == "id") return maps::id();
  if (name == "triv") return maps::triv();
  if (name == "lb") return maps::lb();
  if (name == "bl") return maps::bl();
  if (name == "red") return maps::red();
  if (name == "triv.lb") {
    TranslationMap m = compose(maps::bl(), maps::triv());
    m.name = "triv.lb";
    return m;
  }
  if (auto dot = name.find('.'); dot != std::string::npos) {
    // outer.inner: apply inner first
    return compose(translation_by_name(name.substr(dot + 1)), translation_by_name(name.substr(0, dot)));
  }
  throw error("unknown translation '" + name + "' (expected id, triv, lb, bl, red, triv.lb)");
}

/// Replaces each fix(chi), innermost first, by chi with * := top.
inline Formula eliminate_fixpoints(const Formula& f) {
  require_mode(f, LanguageMode::arrow_fp);
  if (!fixpoint_grammar_ok(f)) throw mode_error("'*' must occur under a Lewis arrow inside its fix(...)");
  std::unordered_map<Formula, Formula> memo;
  std::function<Formula(const Formula&)> go = [&](const Formula& h) -> Formula {
    if (!h.has_fix()) return h;
    if (auto it = memo.find(h); it != memo.end()) return it->second;
    Formula r = h.is(Kind::Fix) ? substitute_star(go(h.body()), Formula::top())
                                : is_binary(h.kind()) ? Formula::make_binary(h.kind(), go(h.lhs()), go(h.rhs()))
                                                      : Formula::make_unary(h.kind(), go(h.body()));
    memo.emplace(h, r);
    return r;
  };
  return go(f);
}

}  // namespace islkit
