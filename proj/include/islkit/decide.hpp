#pragma once

// Decision kernel: type elimination over an adequate set, plus a
// goal-directed search over the same greatest fixpoint.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "islkit/formula.hpp"
#include "islkit/kripke.hpp"
#include "islkit/syntax.hpp"

namespace islkit {

enum class Logic { isl_a, isl_a_plus, isl_box };

inline std::string_view to_string(Logic l) {
  switch (l) {
    case Logic::isl_a: return "isl-a";
    case Logic::isl_a_plus: return "isl-a+";
    case Logic::isl_box: return "isl-box";
  }
  return "?";
}

inline Logic parse_logic(std::string_view s) {
  if (s == "isl-a") return Logic::isl_a;
  if (s == "isl-a+" || s == "isl-a-plus") return Logic::isl_a_plus;
  if (s == "isl-box") return Logic::isl_box;
  throw error("unknown logic '" + std::string(s) + "' (expected isl-a, isl-a+ or isl-box)");
}

inline LanguageMode mode_of(Logic l) { return l == Logic::isl_box ? LanguageMode::box : LanguageMode::arrow; }
inline ClosureKind closure_kind_of(Logic l) {
  return l == Logic::isl_a_plus ? ClosureKind::adequateplus : ClosureKind::adequate;
}
inline FrameClass frame_class_of(Logic l) { return l == Logic::isl_a ? FrameClass::isl : FrameClass::brilliant; }
inline CountMode count_mode_of(Logic l) {
  switch (l) {
    case Logic::isl_a: return CountMode::arrow;
    case Logic::isl_a_plus: return CountMode::arrowplus;
    case Logic::isl_box: return CountMode::box;
  }
  return CountMode::arrow;
}

struct Budget {
  std::size_t max_types = 20;  // |X| for explicit elimination; 2^max_types explored types for search
  std::size_t max_nodes = 4;   // model enumeration
  unsigned jobs = 1;
};

// ---------------------------------------------------------------------------
// Type bitsets

class TypeBits {
 public:
  static constexpr std::size_t kWords = 4;
  static constexpr std::size_t kMax = 64 * kWords;

  bool test(std::size_t i) const { return w_[i >> 6] >> (i & 63) & 1; }
  void set(std::size_t i, bool v = true) {
    if (v) w_[i >> 6] |= std::uint64_t{1} << (i & 63);
    else w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }
  bool subset_of(const TypeBits& o) const {
    for (std::size_t k = 0; k < kWords; ++k)
      if (w_[k] & ~o.w_[k]) return false;
    return true;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  std::size_t hash() const {
    std::size_t h = 0;
    for (auto w : w_) h = detail::mix(h, std::hash<std::uint64_t>{}(w));
    return h;
  }
  friend bool operator==(const TypeBits&, const TypeBits&) = default;
  /// Numeric order with bit i weighted 2^i.
  friend bool operator<(const TypeBits& a, const TypeBits& b) {
    for (std::size_t k = kWords; k-- > 0;)
      if (a.w_[k] != b.w_[k]) return a.w_[k] < b.w_[k];
    return false;
  }
  std::string to_string(std::size_t n) const {
    std::string s(n, '0');
    for (std::size_t i = 0; i < n; ++i) s[n - 1 - i] = test(i) ? '1' : '0';
    return s;
  }

 private:
  std::array<std::uint64_t, kWords> w_{};
};

struct TypeBitsHash {
  std::size_t operator()(const TypeBits& t) const { return t.hash(); }
};

// ---------------------------------------------------------------------------
// Adequate sets

class AdequateSet {
 public:
  struct Entry {
    Kind kind;
    int l = -1, r = -1;  // child indices; for Box, l = index of top
    int imp = -1;        // for arrows: index of (l -> r) when present
  };

  AdequateSet(const std::vector<Formula>& seeds, Logic logic) : logic_(logic) {
    for (const Formula& f : seeds) {
      require_mode(f, mode_of(logic));
      if (f.has_fix() || f.has_star()) throw mode_error("eliminate fixpoint binders before deciding");
    }
    fs_ = closure(seeds, closure_kind_of(logic));
    if (fs_.size() > TypeBits::kMax)
      throw budget_exceeded("adequate set has " + std::to_string(fs_.size()) + " members; limit is " +
                            std::to_string(TypeBits::kMax));
    for (std::size_t i = 0; i < fs_.size(); ++i) index_.emplace(fs_[i], i);
    entries_.resize(fs_.size());
    for (std::size_t i = 0; i < fs_.size(); ++i) {
      const Formula& f = fs_[i];
      Entry& e = entries_[i];
      e.kind = f.kind();
      if (is_binary(f.kind())) {
        e.l = static_cast<int>(index_.at(f.lhs()));
        e.r = static_cast<int>(index_.at(f.rhs()));
      } else if (f.is(Kind::Box)) {
        e.l = static_cast<int>(index_.at(Formula::top()));
        e.r = static_cast<int>(index_.at(f.body()));
      }
      if (f.is(Kind::Arrow)) {
        if (auto it = index_.find(Formula::imp(f.lhs(), f.rhs())); it != index_.end()) e.imp = static_cast<int>(it->second);
      }
      if (f.is(Kind::Arrow) || f.is(Kind::Box)) modal_.push_back(i);
      if (f.is(Kind::Imp)) imps_.push_back(i);
    }
    top_ = index_.at(Formula::top());
    bot_ = index_.at(Formula::bot());
  }

  AdequateSet(const Formula& f, Logic logic) : AdequateSet(std::vector<Formula>{f}, logic) {}

  Logic logic() const { return logic_; }
  std::size_t size() const { return fs_.size(); }
  const Formula& operator[](std::size_t i) const { return fs_[i]; }
  const std::vector<Formula>& formulas() const { return fs_; }
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  const std::vector<std::size_t>& modal() const { return modal_; }
  const std::vector<std::size_t>& imps() const { return imps_; }
  std::size_t top() const { return top_; }
  std::size_t bot() const { return bot_; }

  std::optional<std::size_t> index_of(const Formula& f) const {
    if (auto it = index_.find(f); it != index_.end()) return it->second;
    return std::nullopt;
  }

  std::vector<Formula> members(const TypeBits& t) const {
    std::vector<Formula> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (t.test(i)) out.push_back(fs_[i]);
    return out;
  }

  TypeBits bits_of(const std::vector<Formula>& theory) const {
    TypeBits t;
    for (const Formula& f : theory) {
      auto i = index_of(f);
      if (!i) throw error("formula " + show(f) + " is not in the adequate set");
      t.set(*i);
    }
    return t;
  }

  /// Variables, implications and modal members: the bound on Henkin depth.
  std::size_t nu() const { return nu_of_set(fs_); }

  VariableSet variables() const {
    VariableSet vs;
    for (const Formula& f : fs_)
      if (f.is(Kind::Var)) vs.insert(f.name());
    return vs;
  }

  friend bool operator==(const AdequateSet& a, const AdequateSet& b) {
    return a.logic_ == b.logic_ && a.fs_ == b.fs_;
  }

 private:
  Logic logic_;
  std::vector<Formula> fs_;
  std::unordered_map<Formula, std::size_t> index_;
  std::vector<Entry> entries_;
  std::vector<std::size_t> modal_, imps_;
  std::size_t top_ = 0, bot_ = 0;
};

// ---------------------------------------------------------------------------
// Clause enumeration of types

namespace detail {

using Clauses = std::vector<std::vector<int>>;  // literal = 2*var + negated

inline int pos(std::size_t v) { return static_cast<int>(2 * v); }
inline int neg(std::size_t v) { return static_cast<int>(2 * v + 1); }

/// Local saturation as clauses.
inline Clauses local_clauses(const AdequateSet& X) {
  Clauses cs;
  cs.push_back({pos(X.top())});
  cs.push_back({neg(X.bot())});
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto& e = X.entry(i);
    const std::size_t l = static_cast<std::size_t>(e.l), r = static_cast<std::size_t>(e.r);
    switch (e.kind) {
      case Kind::And:
        cs.push_back({neg(i), pos(l)});
        cs.push_back({neg(i), pos(r)});
        cs.push_back({pos(i), neg(l), neg(r)});
        break;
      case Kind::Or:
        cs.push_back({neg(i), pos(l), pos(r)});
        cs.push_back({pos(i), neg(l)});
        cs.push_back({pos(i), neg(r)});
        break;
      case Kind::Imp: cs.push_back({neg(i), neg(l), pos(r)}); break;
      default: break;
    }
  }
  return cs;
}

/// Consequences of membership = forcing that hold in every surviving type;
/// used only to prune the goal-directed search.
inline Clauses survivor_clauses(const AdequateSet& X) {
  Clauses cs;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto& e = X.entry(i);
    if (e.kind != Kind::Imp && e.kind != Kind::Arrow && e.kind != Kind::Box) continue;
    const std::size_t l = static_cast<std::size_t>(e.l), r = static_cast<std::size_t>(e.r);
    cs.push_back({neg(r), pos(i)});
    if (e.kind != Kind::Box && (l == X.bot() || l == r)) cs.push_back({pos(i)});
    if (e.kind == Kind::Arrow && e.imp >= 0) cs.push_back({neg(static_cast<std::size_t>(e.imp)), pos(i)});
  }
  return cs;
}

class TypeEnumerator {
 public:
  TypeEnumerator(std::size_t n, std::vector<const Clauses*> sets) : n_(n), sets_(std::move(sets)) {}

  /// Calls `fn` on every total assignment satisfying all clauses, the
  /// `extra` clauses and `fixed` (entries -1 are free), in increasing numeric
  /// order. Stops when `fn` returns false; returns false in that case.
  bool run(std::vector<std::int8_t> fixed, const Clauses& extra, const std::function<bool(const TypeBits&)>& fn,
           std::size_t* steps = nullptr, std::size_t step_limit = SIZE_MAX) const {
    Run r{&extra, steps, step_limit};
    return dfs(std::move(fixed), r, fn);
  }

 private:
  bool propagate_set(std::vector<std::int8_t>& a, const Clauses& cs, bool& changed) const {
    for (const auto& c : cs) {
      int unknown = -1;
      int n_unknown = 0;
      bool sat = false;
      for (int lit : c) {
        const std::int8_t v = a[static_cast<std::size_t>(lit >> 1)];
        if (v < 0) {
          ++n_unknown;
          unknown = lit;
        } else if (v == ((lit & 1) ? 0 : 1)) {
          sat = true;
          break;
        }
      }
      if (sat) continue;
      if (n_unknown == 0) return false;
      if (n_unknown == 1) {
        a[static_cast<std::size_t>(unknown >> 1)] = (unknown & 1) ? 0 : 1;
        changed = true;
      }
    }
    return true;
  }

  struct Run {
    const Clauses* extra;
    std::size_t* steps;
    std::size_t limit;
  };

  bool propagate(std::vector<std::int8_t>& a, const Clauses& extra) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Clauses* cs : sets_)
        if (!propagate_set(a, *cs, changed)) return false;
      if (!propagate_set(a, extra, changed)) return false;
    }
    return true;
  }

  bool dfs(std::vector<std::int8_t> a, const Run& r, const std::function<bool(const TypeBits&)>& fn) const {
    if (r.steps && ++*r.steps > r.limit) throw budget_exceeded("type search exceeded its step budget");
    if (!propagate(a, *r.extra)) return true;
    std::size_t v = n_;
    for (std::size_t i = n_; i-- > 0;)
      if (a[i] < 0) {
        v = i;
        break;
      }
    if (v == n_) {
      TypeBits t;
      for (std::size_t i = 0; i < n_; ++i)
        if (a[i] == 1) t.set(i);
      return fn(t);
    }
    for (std::int8_t val : {std::int8_t{0}, std::int8_t{1}}) {
      auto b = a;
      b[v] = val;
      if (!dfs(std::move(b), r, fn)) return false;
    }
    return true;
  }

  std::size_t n_;
  std::vector<const Clauses*> sets_;
};

}  // namespace detail

/// All locally saturated subsets of X, in increasing numeric order.
inline std::vector<TypeBits> local_types(const AdequateSet& X, const Budget& budget = {}) {
  if (X.size() > budget.max_types)
    throw budget_exceeded("|X| = " + std::to_string(X.size()) + " exceeds the type budget of " +
                          std::to_string(budget.max_types));
  const auto base = detail::local_clauses(X);
  detail::TypeEnumerator en(X.size(), {&base});
  std::vector<TypeBits> out;
  en.run(std::vector<std::int8_t>(X.size(), -1), {}, [&](const TypeBits& t) {
    out.push_back(t);
    return true;
  });
  return out;
}

/// Checks the local saturation conditions directly.
inline bool is_local_type(const AdequateSet& X, const TypeBits& t) {
  if (!t.test(X.top()) || t.test(X.bot())) return false;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto& e = X.entry(i);
    switch (e.kind) {
      case Kind::And:
        if (t.test(i) != (t.test(static_cast<std::size_t>(e.l)) && t.test(static_cast<std::size_t>(e.r)))) return false;
        break;
      case Kind::Or:
        if (t.test(i) != (t.test(static_cast<std::size_t>(e.l)) || t.test(static_cast<std::size_t>(e.r)))) return false;
        break;
      case Kind::Imp:
        if (t.test(i) && t.test(static_cast<std::size_t>(e.l)) && !t.test(static_cast<std::size_t>(e.r))) return false;
        break;
      default: break;
    }
  }
  return true;
}

/// The modal clause of the successor rule, without the inclusion part.
inline bool respects(const AdequateSet& X, const TypeBits& t, const TypeBits& u) {
  for (std::size_t i : X.modal()) {
    if (!t.test(i)) continue;
    const auto& e = X.entry(i);
    if (X.logic() == Logic::isl_a_plus) {
      if (e.imp < 0 || !u.test(static_cast<std::size_t>(e.imp))) return false;
    } else if (u.test(static_cast<std::size_t>(e.l)) && !u.test(static_cast<std::size_t>(e.r))) {
      return false;
    }
  }
  return true;
}

inline bool successor_relation(const AdequateSet& X, const TypeBits& t, const TypeBits& u, bool strict) {
  if (!t.subset_of(u)) return false;
  if (strict && t == u) return false;
  return respects(X, t, u);
}

/// Overload checking that both types come from the given set.
inline bool successor_relation(const AdequateSet& X, const TypeBits& t, const TypeBits& u, Logic logic, bool strict) {
  if (logic != X.logic()) throw error("successor relation requested for a different logic than the adequate set");
  return successor_relation(X, t, u, strict);
}

// ---------------------------------------------------------------------------
// Henkin structures

struct HenkinStructure {
  AdequateSet X;
  bool strict = true;
  std::vector<TypeBits> types;  // increasing numeric order
  std::vector<std::vector<char>> sub;
  std::vector<std::size_t> depth;
  std::size_t rounds = 0;
  std::size_t candidates = 0;

  Logic logic() const { return X.logic(); }

  std::optional<std::size_t> find(const TypeBits& t) const {
    auto it = std::lower_bound(types.begin(), types.end(), t);
    if (it != types.end() && *it == t) return static_cast<std::size_t>(it - types.begin());
    return std::nullopt;
  }

  KripkeModel model() const {
    KripkeModel m;
    m.vars = X.variables();
    for (std::size_t i = 0; i < types.size(); ++i) m.add_node("t" + std::to_string(i));
    for (std::size_t i = 0; i < types.size(); ++i) {
      for (std::size_t j = 0; j < types.size(); ++j) {
        m.pre[i][j] = types[i].subset_of(types[j]);
        m.sub[i][j] = sub[i][j];
      }
      for (const Formula& f : X.members(types[i]))
        if (f.is(Kind::Var)) m.val[i].insert(f.name());
    }
    return m;
  }
};

namespace detail {

inline void fill_relation(HenkinStructure& h) {
  const std::size_t n = h.types.size();
  h.sub.assign(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h.sub[i][j] = successor_relation(h.X, h.types[i], h.types[j], h.strict);
  // Longest strict-inclusion chain upwards.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return h.types[a].count() > h.types[b].count(); });
  h.depth.assign(n, 0);
  for (std::size_t a : order)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b && h.types[a].subset_of(h.types[b])) h.depth[a] = std::max(h.depth[a], h.depth[b] + 1);
}

/// Whether `t` has a witness for the non-member `i` among `pool`.
inline bool has_witness(const AdequateSet& X, const TypeBits& t, std::size_t i, const std::vector<TypeBits>& pool) {
  const auto& e = X.entry(i);
  const std::size_t l = static_cast<std::size_t>(e.l), r = static_cast<std::size_t>(e.r);
  for (const TypeBits& u : pool) {
    if (!u.test(l) || u.test(r)) continue;
    if (e.kind == Kind::Imp ? t.subset_of(u) : successor_relation(X, t, u, true)) return true;
  }
  return false;
}

inline bool defective(const AdequateSet& X, const TypeBits& t, const std::vector<TypeBits>& pool) {
  for (std::size_t i : X.imps())
    if (!t.test(i) && !has_witness(X, t, i, pool)) return true;
  for (std::size_t i : X.modal())
    if (!t.test(i) && !has_witness(X, t, i, pool)) return true;
  return false;
}

}  // namespace detail

/// Membership = forcing on every survivor, checked with the forcing relation.
inline bool truth_lemma_holds(const HenkinStructure& h, std::string* why = nullptr) {
  const KripkeModel m = h.model();
  Evaluator ev(m);
  for (std::size_t i = 0; i < h.types.size(); ++i)
    for (std::size_t k = 0; k < h.X.size(); ++k)
      if (ev.forces(i, h.X[k]) != h.types[i].test(k)) {
        if (why) *why = "type " + h.types[i].to_string(h.X.size()) + " disagrees on " + show(h.X[k]);
        return false;
      }
  return true;
}

inline constexpr std::size_t kTruthLemmaCheckLimit = 1024;

/// Greatest fixpoint of witness-based deletion, in synchronous rounds.
inline HenkinStructure eliminate(const AdequateSet& X, const Budget& budget = {}) {
  HenkinStructure h{X, true, {}, {}, {}, 0, 0};
  h.types = local_types(X, budget);
  h.candidates = h.types.size();
  const unsigned jobs = std::max(1u, budget.jobs);
  while (true) {
    std::vector<char> dead(h.types.size(), 0);
    auto work = [&](std::size_t from, std::size_t to) {
      for (std::size_t k = from; k < to; ++k) dead[k] = detail::defective(X, h.types[k], h.types);
    };
    if (jobs == 1 || h.types.size() < 256) {
      work(0, h.types.size());
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (h.types.size() + jobs - 1) / jobs;
      for (unsigned j = 0; j < jobs; ++j)
        pool.emplace_back(work, std::min(h.types.size(), j * chunk), std::min(h.types.size(), (j + 1) * chunk));
      for (auto& t : pool) t.join();
    }
    std::vector<TypeBits> next;
    for (std::size_t k = 0; k < h.types.size(); ++k)
      if (!dead[k]) next.push_back(h.types[k]);
    ++h.rounds;
    if (next.size() == h.types.size()) break;
    h.types = std::move(next);
  }
  detail::fill_relation(h);
  if (h.types.size() <= kTruthLemmaCheckLimit) {
    std::string why;
    if (!truth_lemma_holds(h, &why)) throw std::logic_error("truth lemma violated after elimination: " + why);
  }
  return h;
}

inline HenkinStructure eliminate(const AdequateSet& X, Logic logic, const Budget& budget = {}) {
  if (logic != X.logic()) throw error("adequate set was built for a different logic");
  return eliminate(X, budget);
}

/// The elimination result with the non-strict successor relation.
inline HenkinStructure pre_henkin(const AdequateSet& X, const Budget& budget = {}) {
  HenkinStructure h = eliminate(X, budget);
  h.strict = false;
  detail::fill_relation(h);
  if (h.types.size() <= kTruthLemmaCheckLimit) {
    std::string why;
    if (!truth_lemma_holds(h, &why)) throw std::logic_error("truth lemma violated on pre-Henkin structure: " + why);
  }
  return h;
}

inline std::size_t depth(const HenkinStructure& h, const TypeBits& t) {
  auto i = h.find(t);
  if (!i) throw error("type is not a survivor");
  return h.depth[*i];
}

// ---------------------------------------------------------------------------
// Goal-directed search

/// Decides survival of individual types by recursion on strict supersets,
/// memoizing verdicts and the witnesses found.
class TypeSearch {
 public:
  TypeSearch(const AdequateSet& X, const Budget& budget)
      : X_(X),
        base_(detail::local_clauses(X)),
        prune_(detail::survivor_clauses(X)),
        en_(X.size(), {&base_, &prune_}),
        limit_(budget.max_types >= 40 ? SIZE_MAX : (std::size_t{1} << budget.max_types)) {}

  bool good(const TypeBits& t) {
    if (auto it = memo_.find(t); it != memo_.end()) return it->second;
    if (memo_.size() >= limit_)
      throw budget_exceeded("type search explored " + std::to_string(memo_.size()) + " types; raise --max-types");
    std::vector<TypeBits> wit;
    bool ok = true;
    for (std::size_t i : X_.imps())
      if (!t.test(i) && !witness(t, i, wit)) {
        ok = false;
        break;
      }
    if (ok)
      for (std::size_t i : X_.modal())
        if (!t.test(i) && !witness(t, i, wit)) {
          ok = false;
          break;
        }
    memo_.emplace(t, ok);
    if (ok) witnesses_.emplace(t, std::move(wit));
    return ok;
  }

  /// Least surviving type (numeric order) in which `goal` is absent.
  std::optional<TypeBits> least_good_without(std::size_t goal) {
    std::vector<std::int8_t> fixed(X_.size(), -1);
    fixed[goal] = 0;
    std::optional<TypeBits> found;
    en_.run(fixed, {}, [&](const TypeBits& u) {
      if (good(u)) {
        found = u;
        return false;
      }
      return true;
    }, &steps_, step_limit());
    return found;
  }

  /// The root together with every recorded witness reachable from it.
  std::vector<TypeBits> witness_closure(const TypeBits& root) const {
    std::vector<TypeBits> out{root};
    std::unordered_map<TypeBits, bool, TypeBitsHash> seen{{root, true}};
    for (std::size_t k = 0; k < out.size(); ++k) {
      const TypeBits cur = out[k];
      for (const TypeBits& u : witnesses_.at(cur))
        if (seen.emplace(u, true).second) out.push_back(u);
    }
    return out;
  }

  std::size_t explored() const { return memo_.size(); }

 private:
  std::size_t step_limit() const { return limit_ == SIZE_MAX ? SIZE_MAX : limit_ * 64; }

  bool witness(const TypeBits& t, std::size_t i, std::vector<TypeBits>& wit) {
    const auto& e = X_.entry(i);
    const std::size_t l = static_cast<std::size_t>(e.l), r = static_cast<std::size_t>(e.r);
    if (e.kind == Kind::Imp && t.test(l) && !t.test(r)) return true;  // t witnesses itself
    if (t.test(r)) return false;
    std::vector<std::int8_t> fixed(X_.size(), -1);
    for (std::size_t k = 0; k < X_.size(); ++k)
      if (t.test(k)) fixed[k] = 1;
    fixed[l] = 1;
    fixed[r] = 0;
    detail::Clauses extra;
    if (e.kind != Kind::Imp) {
      for (std::size_t a : X_.modal()) {
        if (!t.test(a)) continue;
        const auto& ea = X_.entry(a);
        if (X_.logic() == Logic::isl_a_plus) {
          if (ea.imp < 0) return false;
          extra.push_back({detail::pos(static_cast<std::size_t>(ea.imp))});
        } else {
          extra.push_back({detail::neg(static_cast<std::size_t>(ea.l)), detail::pos(static_cast<std::size_t>(ea.r))});
        }
      }
      std::vector<int> strict;
      for (std::size_t k = 0; k < X_.size(); ++k)
        if (!t.test(k)) strict.push_back(detail::pos(k));
      extra.push_back(std::move(strict));
    }
    std::optional<TypeBits> found;
    en_.run(fixed, extra, [&](const TypeBits& u) {
      if (good(u)) {
        found = u;
        return false;
      }
      return true;
    }, &steps_, step_limit());
    if (found) wit.push_back(*found);
    return found.has_value();
  }

  const AdequateSet& X_;
  detail::Clauses base_, prune_;
  detail::TypeEnumerator en_;
  std::size_t limit_;
  std::size_t steps_ = 0;
  std::unordered_map<TypeBits, bool, TypeBitsHash> memo_;
  std::unordered_map<TypeBits, std::vector<TypeBits>, TypeBitsHash> witnesses_;
};

struct Verdict {
  bool derivable = false;
  std::optional<KripkeModel> countermodel;  // root set when refuted
  std::vector<Formula> root_type;           // the chosen root type, before shrinking
  std::size_t adequate_size = 0;
  std::size_t explored = 0;

  explicit operator bool() const { return derivable; }
};

namespace detail {

inline KripkeModel model_on(const AdequateSet& X, const std::vector<TypeBits>& ts) {
  KripkeModel m;
  m.vars = X.variables();
  for (std::size_t i = 0; i < ts.size(); ++i) m.add_node("t" + std::to_string(i));
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      m.pre[i][j] = ts[i].subset_of(ts[j]);
      m.sub[i][j] = successor_relation(X, ts[i], ts[j], true);
    }
    for (const Formula& f : X.members(ts[i]))
      if (f.is(Kind::Var)) m.val[i].insert(f.name());
  }
  m.root = 0;
  return m;
}

inline void check_countermodel(const KripkeModel& m, const Formula& f, Logic logic) {
  auto v = validate_model(m, frame_class_of(logic));
  if (!v.empty()) throw std::logic_error("countermodel fails validation: " + describe(v.front()));
  if (forces(m, *m.root, f)) throw std::logic_error("countermodel root forces the goal " + show(f));
}

/// Drops nodes one at a time, last first, while the root still refutes f.
/// Nodes outside the root's upset go first.
inline KripkeModel shrink_countermodel(const KripkeModel& m, const Formula& f) {
  const NodeId root = *m.root;
  std::vector<char> keep(m.size(), 0);
  for (NodeId x = 0; x < m.size(); ++x) keep[x] = m.pre[root][x];
  KripkeModel cur = restrict_model(m, keep);
  for (NodeId x = cur.size(); x-- > 0;) {
    if (x == *cur.root) continue;
    std::vector<char> k(cur.size(), 1);
    k[x] = 0;
    KripkeModel next = restrict_model(cur, k);
    if (!forces(next, *next.root, f)) cur = std::move(next);
  }
  return cur;
}

}  // namespace detail

/// Derivability by goal-directed search. On refutation the countermodel is
/// the witness-closed part of the survivor model above the least surviving
/// type that lacks `f`, shrunk node by node while it still refutes `f`.
inline Verdict derivable(const Formula& f, Logic logic, const Budget& budget = {}) {
  const AdequateSet X(f, logic);
  TypeSearch search(X, budget);
  Verdict v;
  v.adequate_size = X.size();
  auto root = search.least_good_without(*X.index_of(f));
  v.explored = search.explored();
  if (!root) {
    v.derivable = true;
    return v;
  }
  v.root_type = X.members(*root);
  v.countermodel = detail::shrink_countermodel(detail::model_on(X, search.witness_closure(*root)), f);
  detail::check_countermodel(*v.countermodel, f, logic);
  return v;
}

/// Derivability through the full elimination fixpoint; the countermodel is
/// the whole survivor model. Limited to |X| <= max_types.
inline Verdict derivable_by_elimination(const Formula& f, Logic logic, const Budget& budget = {}) {
  const AdequateSet X(f, logic);
  const HenkinStructure h = eliminate(X, budget);
  Verdict v;
  v.adequate_size = X.size();
  v.explored = h.candidates;
  const std::size_t goal = *X.index_of(f);
  for (std::size_t i = 0; i < h.types.size(); ++i) {
    if (h.types[i].test(goal)) continue;
    KripkeModel m = h.model();
    m.root = i;
    v.root_type = X.members(h.types[i]);
    detail::check_countermodel(m, f, logic);
    v.countermodel = std::move(m);
    return v;
  }
  v.derivable = true;
  return v;
}

inline bool is_derivable(const Formula& f, Logic logic, const Budget& budget = {}) {
  return derivable(f, logic, budget).derivable;
}

enum class EntailKind { entails, equiv };

/// Finite premises are folded into one implication from their canonical
/// right-nested conjunction.
inline bool entails_equiv(std::vector<Formula> gamma, const Formula& f, Logic logic, EntailKind kind,
                          const Budget& budget = {}) {
  std::sort(gamma.begin(), gamma.end());
  gamma.erase(std::unique(gamma.begin(), gamma.end()), gamma.end());
  const Formula g = big_and(gamma);
  if (!is_derivable(Formula::imp(g, f), logic, budget)) return false;
  return kind == EntailKind::entails || is_derivable(Formula::imp(f, g), logic, budget);
}

inline bool entails(const std::vector<Formula>& gamma, const Formula& f, Logic logic, const Budget& budget = {}) {
  return entails_equiv(gamma, f, logic, EntailKind::entails, budget);
}

inline bool equivalent(const Formula& a, const Formula& b, Logic logic, const Budget& budget = {}) {
  return is_derivable(Formula::imp(a, b), logic, budget) && is_derivable(Formula::imp(b, a), logic, budget);
}

/// First enumerated model and node refuting `f` in the logic's frame class.
inline std::optional<std::pair<KripkeModel, NodeId>> brute_force_search(const Formula& f, Logic logic,
                                                                         std::size_t max_nodes,
                                                                         const Budget& budget = {}) {
  require_mode(f, mode_of(logic));
  const auto& models = cached_models(variables(f), max_nodes, frame_class_of(logic), budget.max_nodes);
  for (const KripkeModel& m : models) {
    Evaluator ev(m);
    const auto& e = ev.extension(f);
    for (NodeId x = 0; x < m.size(); ++x)
      if (!e[x]) {
        KripkeModel out = m;
        out.root = x;
        return std::make_pair(std::move(out), x);
      }
  }
  return std::nullopt;
}

}  // namespace islkit

template <>
struct std::hash<islkit::TypeBits> {
  std::size_t operator()(const islkit::TypeBits& t) const { return t.hash(); }
};
