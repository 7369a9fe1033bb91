#pragma once

// Bounded and full bisimulations between finite models, theory comparison
// over formulas of bounded complexity, and amalgamation of witnessing
// triples.

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "islkit/decide.hpp"
#include "islkit/kripke.hpp"
#include "islkit/syntax.hpp"

namespace islkit {

using Relation = std::vector<std::vector<char>>;  // |K| x |M|

/// Z_0 .. Z_n; layers are nested, Z_{a+1} inside Z_a.
struct BisimLayers {
  VariableSet pvars;
  std::vector<Relation> layers;

  std::size_t depth() const { return layers.empty() ? 0 : layers.size() - 1; }
  bool related(std::size_t alpha, NodeId k, NodeId m) const { return layers.at(alpha)[k][m]; }
  bool downward_closed() const {
    for (std::size_t a = 1; a < layers.size(); ++a)
      for (std::size_t k = 0; k < layers[a].size(); ++k)
        for (std::size_t m = 0; m < layers[a][k].size(); ++m)
          if (layers[a][k][m] && !layers[a - 1][k][m]) return false;
    return true;
  }
};

namespace detail {

inline void require_vars(const KripkeModel& K, const KripkeModel& M, const VariableSet& pvars) {
  for (const auto& p : pvars)
    if (!K.vars.count(p) || !M.vars.count(p))
      throw error("variable '" + p + "' is not declared in both models");
}

inline Relation atom_agreement(const KripkeModel& K, const KripkeModel& M, const VariableSet& pvars) {
  Relation z(K.size(), std::vector<char>(M.size(), 0));
  for (NodeId k = 0; k < K.size(); ++k)
    for (NodeId m = 0; m < M.size(); ++m) {
      bool same = true;
      for (const auto& p : pvars)
        if (K.val[k].count(p) != M.val[m].count(p)) same = false;
      z[k][m] = same;
    }
  return z;
}

/// Pairs of `z` whose pre- and sub-successors zig and zag into `z`.
inline Relation refine(const std::vector<std::vector<NodeId>>& kup, const std::vector<std::vector<NodeId>>& ksc,
                       const std::vector<std::vector<NodeId>>& mup, const std::vector<std::vector<NodeId>>& msc,
                       const Relation& z) {
  Relation out = z;
  auto zig = [&](const std::vector<NodeId>& ks, const std::vector<NodeId>& ms) {
    for (NodeId k2 : ks) {
      bool found = false;
      for (NodeId m2 : ms)
        if (z[k2][m2]) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  };
  auto zag = [&](const std::vector<NodeId>& ks, const std::vector<NodeId>& ms) {
    for (NodeId m2 : ms) {
      bool found = false;
      for (NodeId k2 : ks)
        if (z[k2][m2]) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  };
  for (NodeId k = 0; k < z.size(); ++k)
    for (NodeId m = 0; m < z[k].size(); ++m)
      if (z[k][m])
        out[k][m] = zig(kup[k], mup[m]) && zag(kup[k], mup[m]) && zig(ksc[k], msc[m]) && zag(ksc[k], msc[m]);
  return out;
}

}  // namespace detail

/// The maximal bounded bisimulation up to index n.
inline BisimLayers bounded_bisim(const KripkeModel& K, const KripkeModel& M, const VariableSet& pvars, std::size_t n) {
  detail::require_vars(K, M, pvars);
  const auto kup = K.successors(K.pre), ksc = K.successors(K.sub);
  const auto mup = M.successors(M.pre), msc = M.successors(M.sub);
  BisimLayers b{pvars, {detail::atom_agreement(K, M, pvars)}};
  for (std::size_t a = 0; a < n; ++a) b.layers.push_back(detail::refine(kup, ksc, mup, msc, b.layers.back()));
  return b;
}

/// Greatest fixpoint of the refinement: the maximal bisimulation.
inline Relation full_bisim(const KripkeModel& K, const KripkeModel& M, const VariableSet& pvars) {
  detail::require_vars(K, M, pvars);
  const auto kup = K.successors(K.pre), ksc = K.successors(K.sub);
  const auto mup = M.successors(M.pre), msc = M.successors(M.sub);
  Relation z = detail::atom_agreement(K, M, pvars);
  while (true) {
    Relation next = detail::refine(kup, ksc, mup, msc, z);
    if (next == z) return z;
    z = std::move(next);
  }
}

/// Extensions, on the disjoint union of K and M, of all formulas over pvars
/// of complexity at most n. Each formula's extension is determined by those
/// of its parts, so working with node sets is exact.
inline std::vector<std::vector<char>> bounded_extensions(const KripkeModel& U, const VariableSet& pvars, std::size_t n,
                                                         Logic logic) {
  using Ext = std::vector<char>;
  const std::size_t N = U.size();
  const auto up = U.successors(U.pre), sc = U.successors(U.sub);
  auto lattice_close = [&](std::set<Ext> s) {
    while (true) {
      std::vector<Ext> items(s.begin(), s.end());
      std::size_t before = s.size();
      for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = i + 1; j < items.size(); ++j) {
          Ext a(N), o(N);
          for (std::size_t x = 0; x < N; ++x) {
            a[x] = items[i][x] && items[j][x];
            o[x] = items[i][x] || items[j][x];
          }
          s.insert(std::move(a));
          s.insert(std::move(o));
        }
      if (s.size() == before) return s;
    }
  };
  auto implication = [&](const Ext& a, const Ext& b, const std::vector<std::vector<NodeId>>& succ) {
    Ext e(N, 1);
    for (NodeId x = 0; x < N; ++x)
      for (NodeId y : succ[x])
        if (a[y] && !b[y]) {
          e[x] = 0;
          break;
        }
    return e;
  };
  std::set<Ext> atoms{Ext(N, 0), Ext(N, 1)};
  for (const auto& p : pvars) {
    Ext e(N, 0);
    for (NodeId x = 0; x < N; ++x) e[x] = U.val[x].count(p) ? 1 : 0;
    atoms.insert(e);
  }
  std::set<Ext> cur = lattice_close(atoms);
  for (std::size_t k = 0; k < n; ++k) {
    std::set<Ext> gens = atoms;
    const std::vector<Ext> items(cur.begin(), cur.end());
    for (const Ext& a : items)
      for (const Ext& b : items) {
        gens.insert(implication(a, b, up));
        if (logic == Logic::isl_box) {
          if (a == Ext(N, 1)) gens.insert(implication(a, b, sc));
        } else {
          gens.insert(implication(a, b, sc));
        }
      }
    cur = lattice_close(std::move(gens));
  }
  return {cur.begin(), cur.end()};
}

/// Whether k and m force the same formulas of complexity at most n over
/// pvars.
inline bool theory_equiv(const KripkeModel& K, NodeId k, const KripkeModel& M, NodeId m, const VariableSet& pvars,
                         std::size_t n, Logic logic) {
  detail::require_vars(K, M, pvars);
  K.check_node(k);
  M.check_node(m);
  const KripkeModel U = disjoint_union(K, M);
  const NodeId mk = K.size() + m;
  for (const auto& e : bounded_extensions(U, pvars, n, logic))
    if (e[k] != e[mk]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Amalgamation

struct Amalgam {
  KripkeModel model;
  NodeId root = 0;
  std::vector<std::pair<std::size_t, NodeId>> pairs;  // (type index, node of M)
};

/// Glues the pre-Henkin structure of X to M along pairs admitting a
/// witnessing triple (k', k, m'): Th(k) = Th(k') = type, k' pre k,
/// m' pre m, k' Z_{2d+1} m', k Z_{2d} m, with d the depth of the type.
inline Amalgam amalgamate(const KripkeModel& K, NodeId k0, const KripkeModel& M, NodeId m0, const AdequateSet& X,
                          const Budget& budget = {}) {
  K.check_node(k0);
  M.check_node(m0);
  const FrameClass cls = frame_class_of(X.logic());
  for (const KripkeModel* m : {&K, &M}) {
    const auto v = validate_model(*m, cls);
    if (!v.empty()) throw error((m == &K ? "left" : "right") + std::string(" model is invalid: ") + describe(v.front()));
  }
  VariableSet shared;
  for (const auto& p : K.vars)
    if (M.vars.count(p)) shared.insert(p);
  const VariableSet xvars = X.variables();
  for (const auto& p : shared)
    if (!xvars.count(p)) throw error("shared variable '" + p + "' is missing from the adequate set");
  for (const auto& p : xvars)
    if (!K.vars.count(p)) throw error("adequate set mentions '" + p + "', which the left model does not declare");

  const HenkinStructure h = pre_henkin(X, budget);
  const std::size_t nu = X.nu();
  const BisimLayers z = bounded_bisim(K, M, shared, 2 * nu + 1);
  if (!z.related(2 * nu + 1, k0, m0))
    throw error("roots are not " + std::to_string(2 * nu + 1) + "-bisimilar over the shared variables");

  // Theories of K's nodes as survivor indices.
  Evaluator ev(K);
  std::vector<std::size_t> th(K.size());
  for (NodeId k = 0; k < K.size(); ++k) {
    TypeBits t;
    for (std::size_t i = 0; i < X.size(); ++i)
      if (ev.forces(k, X[i])) t.set(i);
    auto idx = h.find(t);
    if (!idx) throw std::logic_error("a realized theory is missing from the survivors");
    th[k] = *idx;
  }

  std::vector<std::vector<char>> admitted(h.types.size(), std::vector<char>(M.size(), 0));
  for (NodeId kp = 0; kp < K.size(); ++kp) {
    const std::size_t d = h.depth[th[kp]];
    for (NodeId k = 0; k < K.size(); ++k) {
      if (!K.pre[kp][k] || th[k] != th[kp]) continue;
      for (NodeId mp = 0; mp < M.size(); ++mp) {
        if (!z.related(2 * d + 1, kp, mp)) continue;
        for (NodeId m = 0; m < M.size(); ++m)
          if (M.pre[mp][m] && z.related(2 * d, k, m)) admitted[th[kp]][m] = 1;
      }
    }
  }

  Amalgam out;
  out.model.vars = xvars;
  out.model.vars.insert(M.vars.begin(), M.vars.end());
  for (std::size_t t = 0; t < h.types.size(); ++t)
    for (NodeId m = 0; m < M.size(); ++m)
      if (admitted[t][m]) {
        out.pairs.emplace_back(t, m);
        out.model.add_node("t" + std::to_string(t) + "/" + M.nodes[m]);
      }
  const std::size_t n = out.pairs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto [t, m] = out.pairs[i];
    for (const Formula& f : X.members(h.types[t]))
      if (f.is(Kind::Var)) out.model.val[i].insert(f.name());
    out.model.val[i].insert(M.val[m].begin(), M.val[m].end());
    for (std::size_t j = 0; j < n; ++j) {
      const auto [t2, m2] = out.pairs[j];
      out.model.pre[i][j] = h.types[t].subset_of(h.types[t2]) && M.pre[m][m2];
      out.model.sub[i][j] = h.sub[t][t2] && M.sub[m][m2];
    }
    if (t == th[k0] && m == m0) out.root = i;
  }
  out.model.root = out.root;
  return out;
}

}  // namespace islkit
