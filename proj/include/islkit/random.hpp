#pragma once

// Seeded random formulas and models for property tests and the CLI.

#include <random>
#include <string>
#include <vector>

#include "islkit/formula.hpp"
#include "islkit/kripke.hpp"
#include "islkit/syntax.hpp"

namespace islkit {

using Rng = std::mt19937_64;

struct RandomFormulaOptions {
  bool constants = true;  // allow top/bot leaves
  bool modal = true;      // allow the modal connective of the mode
};

/// A formula with `size` constructor nodes over `vars`. Arrow mode has no
/// shape of size 2, so that size gives a leaf.
inline Formula random_formula(Rng& rng, const std::vector<std::string>& vars, std::size_t size, LanguageMode mode,
                              RandomFormulaOptions opt = {}) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  if (size <= 1) {
    const std::size_t leaves = vars.size() + (opt.constants || vars.empty() ? 2 : 0);
    const std::size_t k = pick(leaves);
    if (k < vars.size()) return Formula::var(vars[k]);
    return k == vars.size() ? Formula::top() : Formula::bot();
  }
  std::vector<Kind> kinds{Kind::And, Kind::Or, Kind::Imp};
  if (opt.modal) kinds.push_back(mode == LanguageMode::box ? Kind::Box : Kind::Arrow);
  if (size == 2) {
    if (opt.modal && mode == LanguageMode::box) return Formula::box(random_formula(rng, vars, 1, mode, opt));
    return random_formula(rng, vars, 1, mode, opt);
  }
  const Kind k = kinds[pick(kinds.size())];
  if (k == Kind::Box) return Formula::box(random_formula(rng, vars, size - 1, mode, opt));
  const std::size_t left = 1 + pick(size - 2);
  return Formula::make_binary(k, random_formula(rng, vars, left, mode, opt),
                              random_formula(rng, vars, size - 1 - left, mode, opt));
}

/// Size drawn uniformly from [1, max_size].
inline Formula random_formula_upto(Rng& rng, const std::vector<std::string>& vars, std::size_t max_size,
                                   LanguageMode mode, RandomFormulaOptions opt = {}) {
  const std::size_t s = std::uniform_int_distribution<std::size_t>(1, max_size)(rng);
  return random_formula(rng, vars, s, mode, opt);
}

/// Formula in which `r` occurs only under the modal connective.
inline Formula random_modalized(Rng& rng, const std::vector<std::string>& vars, const std::string& r,
                                std::size_t size, LanguageMode mode) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::vector<std::string> inner = vars;
  inner.push_back(r);
  std::function<Formula(std::size_t)> go = [&](std::size_t s) -> Formula {
    if (s <= 2) {
      if (s == 2 && mode == LanguageMode::box) return Formula::box(random_formula(rng, inner, 1, mode));
      return random_formula(rng, vars, 1, mode);
    }
    const std::size_t choice = pick(4);
    if (choice == 3) {
      if (mode == LanguageMode::box) return Formula::box(random_formula(rng, inner, s - 1, mode));
      const std::size_t left = 1 + pick(s - 2);
      return Formula::arrow(random_formula(rng, inner, left, mode), random_formula(rng, inner, s - 1 - left, mode));
    }
    const Kind k = choice == 0 ? Kind::And : choice == 1 ? Kind::Or : Kind::Imp;
    const std::size_t left = 1 + pick(s - 2);
    return Formula::make_binary(k, go(left), go(s - 1 - left));
  };
  return go(size);
}

/// Formula with at least one bare positive occurrence of `r` and no bare
/// negative one.
inline Formula random_semipositive(Rng& rng, const std::vector<std::string>& vars, const std::string& r,
                                   std::size_t size, LanguageMode mode) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const Formula R = Formula::var(r);
  const std::size_t rest = size > 3 ? size - 2 : 1;
  const Formula g = random_modalized(rng, vars, r, rest, mode);
  switch (pick(4)) {
    case 0: return Formula::disj(R, g);
    case 1: return Formula::conj(R, g);
    case 2: return Formula::imp(g, R);
    default: {
      const Formula h = random_modalized(rng, vars, r, rest > 2 ? rest / 2 : 1, mode);
      return Formula::disj(Formula::conj(R, h), g);
    }
  }
}

/// A random valid model: a random order refining the index order, closed
/// sub, monotone valuation.
inline KripkeModel random_model(Rng& rng, const VariableSet& vars, std::size_t max_nodes, FrameClass cls) {
  auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_nodes)(rng);
  KripkeModel m = KripkeModel::with_nodes(n, vars);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (coin(0.5)) m.pre[a][b] = 1;
  m = close_model(m, cls);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (m.pre[a][b] && coin(0.5)) m.sub[a][b] = 1;
  m = close_model(m, cls);
  for (const auto& v : vars)
    for (std::size_t a = 0; a < n; ++a)
      if (coin(0.35)) {
        for (std::size_t b = 0; b < n; ++b)
          if (m.pre[a][b]) m.val[b].insert(v);
      }
  m.root = 0;
  return m;
}

}  // namespace islkit
