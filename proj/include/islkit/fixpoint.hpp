#pragma once

// Explicit fixed points, fixed-point equation checks, uniqueness and the
// top-Beth construction.

#include <optional>
#include <string>

#include "islkit/decide.hpp"
#include "islkit/formula.hpp"
#include "islkit/syntax.hpp"

namespace islkit {

/// chi[r := top], the fixed point of a modalized or semi-positive chi.
inline Formula explicit_fixpoint(const Formula& chi, const std::string& r) {
  const auto c = classify(chi, r);
  if (!c.modalized_in_v && !c.semipositive_in_v)
    throw error("'" + r + "' occurs unguarded in a negative position; no explicit fixed point is available");
  return substitute(chi, r, Formula::top());
}

/// Kernel verdict on |- candidate <-> chi[r := candidate].
inline bool check_fixpoint(const Formula& chi, const std::string& r, const Formula& candidate, Logic logic,
                           const Budget& budget = {}) {
  return equivalent(candidate, substitute(chi, r, candidate), logic, budget);
}

/// The strong uniqueness instance
/// ((f <-> chi[f]) & (g <-> chi[g])) -> (f <-> g).
inline Formula uniqueness_instance(const Formula& chi, const std::string& r, const Formula& f, const Formula& g) {
  return Formula::imp(Formula::conj(Formula::iff(f, substitute(chi, r, f)), Formula::iff(g, substitute(chi, r, g))),
                      Formula::iff(f, g));
}

inline bool uniqueness_check(const Formula& chi, const std::string& r, const Formula& f, const Formula& g, Logic logic,
                             const Budget& budget = {}) {
  if (!classify(chi, r).modalized_in_v) throw error("uniqueness needs '" + r + "' to be modalized in chi");
  return is_derivable(uniqueness_instance(chi, r, f, g), logic, budget);
}

struct BethResult {
  Formula definition;  // f[p := top]
  std::string fresh;   // the copy variable used in the premise
  bool conclusion_verified = false;
};

/// If f defines p implicitly, returns the explicit definition f[p := top].
inline std::optional<BethResult> beth_explicit(const Formula& f, const std::string& p, Logic logic,
                                               const Budget& budget = {}) {
  const std::string q = fresh_variable(variables(f), "q_");
  const Formula P = Formula::var(p), Q = Formula::var(q);
  const Formula premise = Formula::imp(Formula::conj(f, substitute(f, p, Q)), Formula::iff(P, Q));
  if (!is_derivable(premise, logic, budget)) return std::nullopt;
  BethResult out{substitute(f, p, Formula::top()), q};
  out.conclusion_verified = is_derivable(Formula::imp(f, Formula::iff(P, out.definition)), logic, budget);
  if (!out.conclusion_verified) throw std::logic_error("explicit definition failed its verification");
  return out;
}

}  // namespace islkit
