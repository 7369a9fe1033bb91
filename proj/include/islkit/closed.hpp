#pragma once

// Normal forms of variable-free formulas: every one is equivalent to some
// #^n bot, or to top.

#include <algorithm>
#include <compare>
#include <optional>
#include <string>

#include "islkit/formula.hpp"
#include "islkit/syntax.hpp"

namespace islkit {

/// n in the naturals, or infinity (the value of top).
class Degree {
 public:
  constexpr Degree() = default;
  constexpr explicit Degree(std::size_t n) : n_(n) {}
  static constexpr Degree infinity() {
    Degree d;
    d.inf_ = true;
    return d;
  }

  constexpr bool is_infinite() const { return inf_; }
  constexpr std::size_t value() const { return n_; }

  friend constexpr bool operator==(const Degree&, const Degree&) = default;
  friend constexpr std::strong_ordering operator<=>(const Degree& a, const Degree& b) {
    if (a.inf_ || b.inf_) return a.inf_ <=> b.inf_;
    return a.n_ <=> b.n_;
  }
  friend constexpr Degree operator+(const Degree& a, const Degree& b) {
    if (a.inf_ || b.inf_) return infinity();
    return Degree(a.n_ + b.n_);
  }

  std::string to_string() const { return inf_ ? "inf" : std::to_string(n_); }

 private:
  std::size_t n_ = 0;
  bool inf_ = false;
};

inline Degree normalize_closed(const Formula& f) {
  if (f.has_var()) throw error("normalize_closed expects a variable-free formula");
  switch (f.kind()) {
    case Kind::Bot: return Degree(0);
    case Kind::Top: return Degree::infinity();
    case Kind::And: return std::min(normalize_closed(f.lhs()), normalize_closed(f.rhs()));
    case Kind::Or: return std::max(normalize_closed(f.lhs()), normalize_closed(f.rhs()));
    case Kind::Imp: {
      const Degree a = normalize_closed(f.lhs()), b = normalize_closed(f.rhs());
      return a <= b ? Degree::infinity() : b;
    }
    case Kind::Arrow: {
      const Degree a = normalize_closed(f.lhs()), b = normalize_closed(f.rhs());
      return a <= b ? Degree::infinity() : b + Degree(1);
    }
    case Kind::Box: {
      const Degree b = normalize_closed(f.body());
      return b + Degree(1);
    }
    case Kind::Var:
    case Kind::Star:
    case Kind::Fix: break;
  }
  throw error("normalize_closed: fixpoint syntax is not supported");
}

/// #^n bot, built with the box of the requested language.
inline Formula degree_to_formula(const Degree& d, LanguageMode mode = LanguageMode::arrow) {
  if (d.is_infinite()) return Formula::top();
  Formula f = Formula::bot();
  for (std::size_t i = 0; i < d.value(); ++i) f = mode == LanguageMode::box ? Formula::box(f) : Formula::lbox(f);
  return f;
}

/// Printable form; degrees above `display_bound` are abbreviated.
inline std::string render_degree_formula(const Degree& d, LanguageMode mode = LanguageMode::arrow,
                                         std::size_t display_bound = 64) {
  if (!d.is_infinite() && d.value() > display_bound) return "#^" + std::to_string(d.value()) + " bot";
  return render(degree_to_formula(d, mode), mode == LanguageMode::box ? LanguageMode::box : LanguageMode::arrow);
}

}  // namespace islkit
