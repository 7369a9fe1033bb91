// Axiom schemes as formula builders, shared by the suites.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "islkit/islkit.hpp"

namespace islkit::test {

using F = Formula;
using Scheme = std::function<F(const F&, const F&, const F&)>;

struct NamedScheme {
  std::string name;
  Scheme make;
  LanguageMode mode;
};

// Box as it should read in the given language.
inline F bx(const F& a, LanguageMode m) { return m == LanguageMode::box ? F::box(a) : F::lbox(a); }

inline std::vector<NamedScheme> arrow_base_schemes() {
  const auto A = LanguageMode::arrow;
  return {
      {"Tr", [](const F& a, const F& b, const F& c) { return F::imp(F::conj(F::arrow(a, b), F::arrow(b, c)), F::arrow(a, c)); }, A},
      {"K", [](const F& a, const F& b, const F& c) { return F::imp(F::conj(F::arrow(a, b), F::arrow(a, c)), F::arrow(a, F::conj(b, c))); }, A},
      {"Di", [](const F& a, const F& b, const F& c) { return F::imp(F::conj(F::arrow(a, c), F::arrow(b, c)), F::arrow(F::disj(a, b), c)); }, A},
      {"N", [](const F& a, const F& b, const F&) { return F::arrow(F::conj(a, b), a); }, A},
      {"sL", [](const F& a, const F&, const F&) { return F::imp(F::imp(F::lbox(a), a), a); }, A},
  };
}

inline NamedScheme box_a_scheme() {
  return {"Box_a",
          [](const F& a, const F& b, const F& c) { return F::imp(F::arrow(F::conj(c, a), b), F::arrow(c, F::imp(a, b))); },
          LanguageMode::arrow};
}

// The principles every one of the three logics proves, in the language of `m`.
inline std::vector<NamedScheme> shared_principles(LanguageMode m) {
  std::vector<NamedScheme> out{
      {"sL", [m](const F& a, const F&, const F&) { return F::imp(F::imp(bx(a, m), a), a); }, m},
      {"S_box", [m](const F& a, const F&, const F&) { return F::imp(a, bx(a, m)); }, m},
      {"L_box", [m](const F& a, const F&, const F&) { return F::imp(bx(F::imp(bx(a, m), a), m), bx(a, m)); }, m},
      {"4_box", [m](const F& a, const F&, const F&) { return F::imp(bx(a, m), bx(bx(a, m), m)); }, m},
  };
  if (m != LanguageMode::box) {
    out.push_back({"S_a", [](const F& a, const F& b, const F&) { return F::imp(F::imp(a, b), F::arrow(a, b)); }, m});
    out.push_back({"W", [](const F& a, const F& b, const F&) {
                     return F::imp(F::arrow(F::conj(a, F::lbox(b)), b), F::arrow(a, b));
                   }, m});
    out.push_back({"L_a", [](const F& a, const F&, const F&) { return F::arrow(F::imp(F::lbox(a), a), a); }, m});
  }
  return out;
}

}  // namespace islkit::test
