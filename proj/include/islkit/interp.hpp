#pragma once

// Uniform interpolation: classes of bounded-complexity formulas, definitional
// interpolants, their verification, and a bounded semantic cross-check.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "islkit/bisim.hpp"
#include "islkit/decide.hpp"
#include "islkit/kripke.hpp"
#include "islkit/syntax.hpp"
#include "islkit/translate.hpp"

namespace islkit {

struct EnumBudget {
  std::size_t max_vars = 1;
  std::size_t max_depth = 2;  // only enforced when the variable set is non-empty
  std::size_t max_reps = 4096;
  std::size_t max_kernel_calls = 200000;
  std::size_t fingerprint_nodes = 3;
  Budget kernel{};
};

struct ClassEnumeration {
  VariableSet pvars;
  std::size_t n = 0;
  Logic logic = Logic::isl_a;
  std::vector<Formula> reps;
  std::size_t kernel_calls = 0;
  std::size_t layers_done = 0;  // complete layers; equals n + 1 when complete
  bool complete = false;
};

/// Raised when enumeration runs out of budget; carries what was found.
class enumeration_budget_exceeded : public budget_exceeded {
 public:
  enumeration_budget_exceeded(const std::string& msg, ClassEnumeration partial)
      : budget_exceeded(msg), partial_(std::move(partial)) {}
  const ClassEnumeration& partial() const { return partial_; }

 private:
  ClassEnumeration partial_;
};

// ---------------------------------------------------------------------------
// Fingerprints: extensions on the union of all small models of the class.

class FingerprintUniverse {
 public:
  using Fp = std::vector<std::uint64_t>;

  FingerprintUniverse(const VariableSet& vars, FrameClass cls, std::size_t max_nodes) : vars_(vars) {
    for (const KripkeModel& m : cached_models(vars, max_nodes, cls, std::max<std::size_t>(max_nodes, 4))) {
      const std::size_t off = val_.size();
      for (NodeId x = 0; x < m.size(); ++x) {
        val_.push_back(m.val[x]);
        up_.emplace_back();
        sc_.emplace_back();
        for (NodeId y = 0; y < m.size(); ++y) {
          if (m.pre[x][y]) up_.back().push_back(off + y);
          if (m.sub[x][y]) sc_.back().push_back(off + y);
        }
      }
    }
    words_ = (val_.size() + 63) / 64;
  }

  std::size_t nodes() const { return val_.size(); }

  Fp constant(bool v) const {
    Fp f(words_, v ? ~std::uint64_t{0} : 0);
    trim(f);
    return f;
  }
  Fp atom(const std::string& p) const {
    Fp f(words_, 0);
    for (std::size_t x = 0; x < val_.size(); ++x)
      if (val_[x].count(p)) f[x >> 6] |= std::uint64_t{1} << (x & 63);
    return f;
  }
  static Fp meet(const Fp& a, const Fp& b) {
    Fp r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] & b[i];
    return r;
  }
  static Fp join(const Fp& a, const Fp& b) {
    Fp r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] | b[i];
    return r;
  }
  Fp implication(const Fp& a, const Fp& b, bool modal) const {
    Fp r(words_, 0);
    const auto& succ = modal ? sc_ : up_;
    for (std::size_t x = 0; x < val_.size(); ++x) {
      bool ok = true;
      for (std::size_t y : succ[x])
        if (test(a, y) && !test(b, y)) {
          ok = false;
          break;
        }
      if (ok) r[x >> 6] |= std::uint64_t{1} << (x & 63);
    }
    return r;
  }

  Fp eval(const Formula& f) const {
    switch (f.kind()) {
      case Kind::Bot: return constant(false);
      case Kind::Top: return constant(true);
      case Kind::Var: return atom(f.name());
      case Kind::And: return meet(eval(f.lhs()), eval(f.rhs()));
      case Kind::Or: return join(eval(f.lhs()), eval(f.rhs()));
      case Kind::Imp: return implication(eval(f.lhs()), eval(f.rhs()), false);
      case Kind::Arrow: return implication(eval(f.lhs()), eval(f.rhs()), true);
      case Kind::Box: return implication(constant(true), eval(f.body()), true);
      default: throw error("fingerprints are undefined for fixpoint syntax");
    }
  }

  static bool test(const Fp& f, std::size_t x) { return f[x >> 6] >> (x & 63) & 1; }

 private:
  void trim(Fp& f) const {
    const std::size_t extra = words_ * 64 - val_.size();
    if (extra && !f.empty()) f.back() &= ~std::uint64_t{0} >> extra;
  }

  VariableSet vars_;
  std::vector<VariableSet> val_;
  std::vector<std::vector<std::size_t>> up_, sc_;
  std::size_t words_ = 0;
};

struct FpHash {
  std::size_t operator()(const FingerprintUniverse::Fp& f) const {
    std::size_t h = 0;
    for (auto w : f) h = detail::mix(h, std::hash<std::uint64_t>{}(w));
    return h;
  }
};

// ---------------------------------------------------------------------------
// Enumeration

namespace detail {

class ClassBuilder {
 public:
  ClassBuilder(const VariableSet& pvars, std::size_t n, Logic logic, const EnumBudget& budget)
      : uni_(pvars, frame_class_of(logic), budget.fingerprint_nodes), budget_(budget) {
    out_.pvars = pvars;
    out_.n = n;
    out_.logic = logic;
  }

  ClassEnumeration run() {
    const std::size_t n = out_.n;
    add(Formula::bot());
    add(Formula::top());
    for (const auto& p : out_.pvars) add(Formula::var(p));
    close_lattice(0);
    out_.layers_done = 1;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t before = out_.reps.size();
      const std::vector<Formula> snapshot = out_.reps;
      for (const Formula& a : snapshot)
        for (const Formula& b : snapshot) {
          add(Formula::imp(a, b));
          if (out_.logic != Logic::isl_box) add(Formula::arrow(a, b));
        }
      if (out_.logic == Logic::isl_box)
        for (const Formula& b : snapshot) add(Formula::box(b));
      close_lattice(before);
      out_.layers_done = k + 2;
    }
    out_.complete = true;
    return out_;
  }

  const ClassEnumeration& partial() const { return out_; }

 private:
  using Fp = FingerprintUniverse::Fp;

  /// Adds `f` unless a kernel-equivalent representative exists.
  bool add(const Formula& f) {
    Fp fp = uni_.eval_cached(f, fps_);
    auto& bucket = buckets_[fp];
    for (std::size_t i : bucket) {
      if (++out_.kernel_calls > budget_.max_kernel_calls) fail("kernel call budget");
      if (equivalent(f, out_.reps[i], out_.logic, budget_.kernel)) return false;
    }
    if (out_.reps.size() >= budget_.max_reps) fail("representative budget");
    bucket.push_back(out_.reps.size());
    out_.reps.push_back(f);
    fps_.emplace(f, std::move(fp));
    return true;
  }

  void close_lattice(std::size_t frontier) {
    while (frontier < out_.reps.size()) {
      const std::size_t end = out_.reps.size();
      for (std::size_t j = frontier; j < end; ++j)
        for (std::size_t i = 0; i < j; ++i) {
          const Formula a = out_.reps[i], b = out_.reps[j];
          add(a < b ? Formula::conj(a, b) : Formula::conj(b, a));
          add(a < b ? Formula::disj(a, b) : Formula::disj(b, a));
        }
      frontier = end;
    }
  }

  [[noreturn]] void fail(const std::string& what) {
    throw enumeration_budget_exceeded("enumeration of C_" + std::to_string(out_.n) + " exceeded the " + what +
                                          " after " + std::to_string(out_.reps.size()) + " representatives",
                                      out_);
  }

  struct Universe : FingerprintUniverse {
    using FingerprintUniverse::FingerprintUniverse;
    /// Evaluates with children looked up among known fingerprints.
    Fp eval_cached(const Formula& f, const std::unordered_map<Formula, Fp>& known) const {
      if (auto it = known.find(f); it != known.end()) return it->second;
      switch (f.kind()) {
        case Kind::And: return meet(eval_cached(f.lhs(), known), eval_cached(f.rhs(), known));
        case Kind::Or: return join(eval_cached(f.lhs(), known), eval_cached(f.rhs(), known));
        case Kind::Imp: return implication(eval_cached(f.lhs(), known), eval_cached(f.rhs(), known), false);
        case Kind::Arrow: return implication(eval_cached(f.lhs(), known), eval_cached(f.rhs(), known), true);
        case Kind::Box: return implication(constant(true), eval_cached(f.body(), known), true);
        default: return eval(f);
      }
    }
  };

  Universe uni_;
  EnumBudget budget_;
  ClassEnumeration out_;
  std::unordered_map<Formula, Fp> fps_;
  std::unordered_map<Fp, std::vector<std::size_t>, FpHash> buckets_;
};

}  // namespace detail

/// Representatives of the formulas over `pvars` of complexity at most `n`,
/// one per class of provable equivalence, in generation order.
inline ClassEnumeration enum_representatives(const VariableSet& pvars, std::size_t n, Logic logic,
                                             const EnumBudget& budget = {}) {
  if (pvars.size() > budget.max_vars)
    throw budget_exceeded("enumeration limited to " + std::to_string(budget.max_vars) + " variable(s)");
  if (!pvars.empty() && n > budget.max_depth)
    throw budget_exceeded("enumeration limited to complexity " + std::to_string(budget.max_depth));
  detail::ClassBuilder b(pvars, n, logic, budget);
  return b.run();
}

/// Memoized enumeration shared across calls with the same arguments.
inline const ClassEnumeration& cached_representatives(const VariableSet& pvars, std::size_t n, Logic logic,
                                                      const EnumBudget& budget = {}) {
  static std::mutex mu;
  static std::map<std::tuple<VariableSet, std::size_t, int>, std::unique_ptr<ClassEnumeration>> cache;
  const auto key = std::make_tuple(pvars, n, static_cast<int>(logic));
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return *it->second;
  }
  auto e = std::make_unique<ClassEnumeration>(enum_representatives(pvars, n, logic, budget));
  std::lock_guard lock(mu);
  auto& slot = cache[key];
  if (!slot) slot = std::move(e);
  return *slot;
}

/// Conjunction of the representatives forced at x, disjunction of the rest.
inline std::pair<Formula, Formula> theta_split(const KripkeModel& m, NodeId x, const VariableSet& pvars, std::size_t n,
                                               Logic logic, const EnumBudget& budget = {}) {
  m.check_node(x);
  const auto& e = cached_representatives(pvars, n, logic, budget);
  Evaluator ev(m);
  std::vector<Formula> plus, minus;
  for (const Formula& r : e.reps) (ev.forces(x, r) ? plus : minus).push_back(r);
  std::sort(plus.begin(), plus.end());
  std::sort(minus.begin(), minus.end());
  return {big_and(plus), big_or(minus)};
}

// ---------------------------------------------------------------------------
// Interpolants

enum class QuantKind { exists, forall };

inline std::string_view to_string(QuantKind k) { return k == QuantKind::exists ? "exists" : "forall"; }

struct InterpolantChecks {
  bool variable_condition = false;
  bool base_implication = false;
  std::size_t sample_size = 0;
  std::size_t sample_passed = 0;
  std::optional<Formula> counterexample;
  std::size_t complexity = 0;
  std::size_t complexity_bound = 0;
  bool complexity_ok = false;

  bool ok() const {
    return variable_condition && base_implication && sample_passed == sample_size && complexity_ok;
  }
};

struct InterpolantReport {
  Formula input;
  VariableSet qvars;
  QuantKind kind = QuantKind::exists;
  Logic logic = Logic::isl_a;
  Formula theta;
  std::size_t nu = 0;
  std::size_t nominal_bound = 0;
  std::size_t bound_used = 0;
  bool fallback = false;
  std::string route;
  std::size_t candidates = 0;
  InterpolantChecks checks;
};

struct InterpOptions {
  std::optional<std::size_t> bound;  // smaller, verified bound instead of the nominal one
  EnumBudget enumeration{};
  Budget kernel{};
};

inline std::size_t interpolant_nu(const Formula& f, Logic logic) { return count_nu(f, count_mode_of(logic)); }

inline std::size_t nominal_bound(const Formula& f, Logic logic, QuantKind kind) {
  const std::size_t nu = interpolant_nu(f, logic);
  return kind == QuantKind::exists ? 2 * nu + 2 : 2 * nu + 1;
}

/// Checks the variable condition, the base implication, the universal
/// property on every sample formula and the complexity bound.
inline InterpolantChecks verify_interpolant(const Formula& f, const VariableSet& qvars, const Formula& theta,
                                            QuantKind kind, Logic logic, const std::vector<Formula>& sample,
                                            const Budget& budget = {}) {
  InterpolantChecks c;
  const auto fv = variables(f);
  c.variable_condition = true;
  for (const auto& v : variables(theta))
    if (qvars.count(v) || !fv.count(v)) c.variable_condition = false;
  c.base_implication = kind == QuantKind::exists ? is_derivable(Formula::imp(f, theta), logic, budget)
                                                 : is_derivable(Formula::imp(theta, f), logic, budget);
  c.sample_size = sample.size();
  for (const Formula& psi : sample) {
    for (const auto& v : variables(psi))
      if (qvars.count(v)) throw error("sample formula " + show(psi) + " mentions a quantified variable");
    bool lhs, rhs;
    if (kind == QuantKind::exists) {
      lhs = is_derivable(Formula::imp(f, psi), logic, budget);
      rhs = is_derivable(Formula::imp(theta, psi), logic, budget);
    } else {
      lhs = is_derivable(Formula::imp(psi, f), logic, budget);
      rhs = is_derivable(Formula::imp(psi, theta), logic, budget);
    }
    if (lhs == rhs) ++c.sample_passed;
    else if (!c.counterexample) c.counterexample = psi;
  }
  c.complexity = complexity(theta);
  c.complexity_bound = nominal_bound(f, logic, kind);
  c.complexity_ok = c.complexity <= c.complexity_bound;
  return c;
}

namespace detail {

/// Definitional interpolant in the arrow logic: meet of the consequences
/// (exists) or join of the antecedents (forall) among the representatives,
/// compressed to a single representative when one is equivalent.
inline InterpolantReport definitional_interpolant(const Formula& f, const VariableSet& qvars, QuantKind kind,
                                                  const InterpOptions& opt) {
  const Logic logic = Logic::isl_a;
  InterpolantReport r;
  r.input = f;
  r.qvars = qvars;
  r.kind = kind;
  r.logic = logic;
  r.nu = interpolant_nu(f, logic);
  r.nominal_bound = nominal_bound(f, logic, kind);
  r.bound_used = opt.bound.value_or(r.nominal_bound);
  r.fallback = r.bound_used < r.nominal_bound;
  r.route = "definitional";
  VariableSet pvars;
  for (const auto& v : variables(f))
    if (!qvars.count(v)) pvars.insert(v);
  const auto& e = cached_representatives(pvars, r.bound_used, logic, opt.enumeration);
  r.candidates = e.reps.size();
  const bool ex = kind == QuantKind::exists;
  std::vector<Formula> hits;
  for (const Formula& chi : e.reps)
    if (is_derivable(ex ? Formula::imp(f, chi) : Formula::imp(chi, f), logic, opt.kernel)) hits.push_back(chi);
  // A hit that implies (exists) or is implied by (forall) every other hit.
  for (const Formula& c : hits) {
    bool extreme = true;
    for (const Formula& h : hits)
      if (c != h && !is_derivable(ex ? Formula::imp(c, h) : Formula::imp(h, c), logic, opt.kernel)) {
        extreme = false;
        break;
      }
    if (extreme) {
      r.theta = c;
      return r;
    }
  }
  // Otherwise build the meet/join incrementally, dropping absorbed parts.
  std::vector<Formula> parts;
  Formula acc = ex ? Formula::top() : Formula::bot();
  for (const Formula& h : hits) {
    if (is_derivable(ex ? Formula::imp(acc, h) : Formula::imp(h, acc), logic, opt.kernel)) continue;
    parts.push_back(h);
    std::sort(parts.begin(), parts.end());
    acc = ex ? big_and(parts) : big_or(parts);
  }
  r.theta = acc;
  return r;
}

}  // namespace detail

/// Computes the exists- or forall-interpolant. The arrow logic is handled
/// directly; the other two are routed through it (triv then back by the
/// identity, or red then back by lb).
inline InterpolantReport interpolant(const Formula& f, const VariableSet& qvars, QuantKind kind, Logic logic,
                                     const InterpOptions& opt = {}) {
  require_mode(f, mode_of(logic));
  InterpolantReport r;
  switch (logic) {
    case Logic::isl_a: r = detail::definitional_interpolant(f, qvars, kind, opt); break;
    case Logic::isl_a_plus: {
      r = detail::definitional_interpolant(apply_translation(f, maps::triv()), qvars, kind, opt);
      r.theta = apply_translation(r.theta, maps::id());
      r.route = "triv/id";
      break;
    }
    case Logic::isl_box: {
      r = detail::definitional_interpolant(apply_translation(f, maps::red()), qvars, kind, opt);
      r.theta = apply_translation(r.theta, maps::lb());
      r.route = "red/lb";
      break;
    }
  }
  r.input = f;
  r.logic = logic;
  r.nu = interpolant_nu(f, logic);
  r.nominal_bound = nominal_bound(f, logic, kind);
  return r;
}

inline InterpolantReport post_interpolant(const Formula& f, const VariableSet& qvars, Logic logic,
                                          const InterpOptions& opt = {}) {
  return interpolant(f, qvars, QuantKind::exists, logic, opt);
}

inline InterpolantReport pre_interpolant(const Formula& f, const VariableSet& qvars, Logic logic,
                                         const InterpOptions& opt = {}) {
  return interpolant(f, qvars, QuantKind::forall, logic, opt);
}

/// exists q f computed as forall r ((forall q (f -> r)) -> r), r fresh.
inline Formula exists_via_forall(const Formula& f, const VariableSet& qvars, Logic logic,
                                 const InterpOptions& opt = {}) {
  VariableSet used = variables(f);
  used.insert(qvars.begin(), qvars.end());
  const Formula r = Formula::var(fresh_variable(used, "r_"));
  const Formula inner = pre_interpolant(Formula::imp(f, r), qvars, logic, opt).theta;
  return pre_interpolant(Formula::imp(inner, r), {r.name()}, logic, opt).theta;
}

enum class SemanticVerdict { holds, fails, unknown };

inline std::string_view to_string(SemanticVerdict v) {
  switch (v) {
    case SemanticVerdict::holds: return "holds";
    case SemanticVerdict::fails: return "fails";
    case SemanticVerdict::unknown: return "unknown";
  }
  return "?";
}

/// Compares forcing of exists q f at x with a bounded search for a model
/// whose node forcing f is bisimilar to x over the variables of m.
inline SemanticVerdict semantic_quantifier_check(const KripkeModel& m, NodeId x, const std::string& q,
                                                 const Formula& f, Logic logic, std::size_t max_nodes,
                                                 const InterpOptions& opt = {}) {
  if (m.vars.count(q)) throw error("quantified variable '" + q + "' is already declared in the model");
  m.check_node(x);
  for (const auto& v : variables(f))
    if (v != q && !m.vars.count(v)) throw error("formula mentions '" + v + "', which the model does not declare");
  const Formula theta = post_interpolant(f, {q}, logic, opt).theta;
  const bool claimed = forces(m, x, theta);
  VariableSet ext = m.vars;
  ext.insert(q);
  bool witness = false;
  for_each_model(ext, max_nodes, frame_class_of(logic), [&](const KripkeModel& n) {
    Evaluator ev(n);
    const auto& e = ev.extension(f);
    std::vector<NodeId> cand;
    for (NodeId y = 0; y < n.size(); ++y)
      if (e[y]) cand.push_back(y);
    if (cand.empty()) return true;
    const Relation z = full_bisim(m, n, m.vars);
    for (NodeId y : cand)
      if (z[x][y]) {
        witness = true;
        return false;
      }
    return true;
  }, std::max(max_nodes, opt.kernel.max_nodes));
  if (witness) return claimed ? SemanticVerdict::holds : SemanticVerdict::fails;
  return claimed ? SemanticVerdict::unknown : SemanticVerdict::holds;
}

}  // namespace islkit
