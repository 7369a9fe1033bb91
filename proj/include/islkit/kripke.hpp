#pragma once

// Finite Kripke models with an intuitionistic order and a strict modal
// relation, forcing, validation and exhaustive enumeration.

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "islkit/formula.hpp"
#include "islkit/syntax.hpp"

namespace islkit {

using NodeId = std::size_t;

enum class FrameClass { isl, brilliant, preorder_only };

inline std::string_view to_string(FrameClass c) {
  switch (c) {
    case FrameClass::isl: return "isl";
    case FrameClass::brilliant: return "brilliant";
    case FrameClass::preorder_only: return "preorder-only";
  }
  return "?";
}

/// Relations are kept as dense matrices, exactly as given; nothing is closed
/// implicitly.
struct KripkeModel {
  VariableSet vars;
  std::vector<std::string> nodes;
  std::vector<std::vector<char>> pre;
  std::vector<std::vector<char>> sub;
  std::vector<VariableSet> val;
  std::optional<NodeId> root;

  std::size_t size() const { return nodes.size(); }

  NodeId add_node(std::string name) {
    const NodeId id = nodes.size();
    nodes.push_back(std::move(name));
    for (auto& row : pre) row.push_back(0);
    for (auto& row : sub) row.push_back(0);
    pre.emplace_back(nodes.size(), 0);
    sub.emplace_back(nodes.size(), 0);
    val.emplace_back();
    return id;
  }

  /// Adds `n` nodes named w0.. with reflexive pre.
  static KripkeModel with_nodes(std::size_t n, VariableSet vars = {}) {
    KripkeModel m;
    m.vars = std::move(vars);
    for (std::size_t i = 0; i < n; ++i) m.add_node("w" + std::to_string(i));
    for (std::size_t i = 0; i < n; ++i) m.pre[i][i] = 1;
    return m;
  }

  NodeId index_of(const std::string& name) const {
    for (NodeId i = 0; i < nodes.size(); ++i)
      if (nodes[i] == name) return i;
    throw error("unknown node '" + name + "'");
  }

  void check_node(NodeId x) const {
    if (x >= nodes.size()) throw error("unknown node #" + std::to_string(x));
  }

  std::vector<std::vector<NodeId>> successors(const std::vector<std::vector<char>>& rel) const {
    std::vector<std::vector<NodeId>> out(size());
    for (NodeId i = 0; i < size(); ++i)
      for (NodeId j = 0; j < size(); ++j)
        if (rel[i][j]) out[i].push_back(j);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string condition;
  std::vector<std::string> witness;
};

inline std::string describe(const Violation& v) {
  std::string s = v.condition + " at";
  for (const auto& w : v.witness) s += " " + w;
  return s;
}

inline std::vector<Violation> validate_model(const KripkeModel& m, FrameClass cls) {
  std::vector<Violation> out;
  const std::size_t n = m.size();
  auto name = [&](NodeId i) { return m.nodes[i]; };
  if (m.pre.size() != n || m.sub.size() != n || m.val.size() != n) {
    out.push_back({"shape mismatch", {}});
    return out;
  }
  for (NodeId x = 0; x < n; ++x) {
    if (!m.pre[x][x]) out.push_back({"reflexivity", {name(x)}});
    if (cls != FrameClass::preorder_only && m.sub[x][x]) out.push_back({"irreflexivity", {name(x)}});
    for (const auto& v : m.val[x])
      if (!m.vars.count(v)) out.push_back({"valuation uses undeclared variable " + v, {name(x)}});
  }
  for (NodeId x = 0; x < n; ++x)
    for (NodeId y = 0; y < n; ++y) {
      if (x != y && m.pre[x][y] && m.pre[y][x]) {
        if (x < y) out.push_back({"antisymmetry", {name(x), name(y)}});
      }
      if (m.sub[x][y] && !m.pre[x][y]) out.push_back({"sub not contained in pre", {name(x), name(y)}});
      if (m.pre[x][y]) {
        for (const auto& v : m.val[x])
          if (!m.val[y].count(v)) out.push_back({"monotonicity of " + v, {name(x), name(y)}});
      }
      for (NodeId z = 0; z < n; ++z) {
        if (m.pre[x][y] && m.pre[y][z] && !m.pre[x][z]) out.push_back({"transitivity", {name(x), name(y), name(z)}});
        if (m.pre[x][y] && m.sub[y][z] && !m.sub[x][z])
          out.push_back({"pre;sub not contained in sub", {name(x), name(y), name(z)}});
        if (cls == FrameClass::brilliant && m.sub[x][y] && m.pre[y][z] && !m.sub[x][z])
          out.push_back({"brilliancy", {name(x), name(y), name(z)}});
      }
    }
  if (m.root && *m.root >= n) out.push_back({"root out of range", {}});
  return out;
}

inline bool is_valid(const KripkeModel& m, FrameClass cls) { return validate_model(m, cls).empty(); }

/// Adds sub to pre, takes the reflexive-transitive closure of pre, then
/// saturates sub under pre;sub (and sub;pre for brilliant frames).
inline KripkeModel close_model(KripkeModel m, FrameClass cls) {
  const std::size_t n = m.size();
  for (NodeId x = 0; x < n; ++x) {
    m.pre[x][x] = 1;
    for (NodeId y = 0; y < n; ++y)
      if (m.sub[x][y]) m.pre[x][y] = 1;
  }
  for (NodeId k = 0; k < n; ++k)
    for (NodeId i = 0; i < n; ++i)
      if (m.pre[i][k])
        for (NodeId j = 0; j < n; ++j)
          if (m.pre[k][j]) m.pre[i][j] = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId x = 0; x < n; ++x)
      for (NodeId y = 0; y < n; ++y)
        for (NodeId z = 0; z < n; ++z) {
          const bool want = (m.pre[x][y] && m.sub[y][z]) || (cls == FrameClass::brilliant && m.sub[x][y] && m.pre[y][z]);
          if (want && !m.sub[x][z]) {
            m.sub[x][z] = 1;
            changed = true;
          }
        }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Forcing

/// Memoizing evaluator for one model. Extensions are computed bottom-up and
/// shared across queries on the same evaluator.
class Evaluator {
 public:
  explicit Evaluator(const KripkeModel& m) : m_(m), up_(m.successors(m.pre)), sc_(m.successors(m.sub)) {}

  const std::vector<char>& extension(const Formula& f) {
    if (auto it = memo_.find(f); it != memo_.end()) return it->second;
    std::vector<char> e(m_.size(), 0);
    switch (f.kind()) {
      case Kind::Bot: break;
      case Kind::Top: std::fill(e.begin(), e.end(), 1); break;
      case Kind::Var:
        if (!m_.vars.count(f.name())) throw error("unknown variable '" + f.name() + "'");
        for (NodeId x = 0; x < m_.size(); ++x) e[x] = m_.val[x].count(f.name()) ? 1 : 0;
        break;
      case Kind::And: {
        const auto a = extension(f.lhs());
        const auto& b = extension(f.rhs());
        for (NodeId x = 0; x < m_.size(); ++x) e[x] = a[x] && b[x];
        break;
      }
      case Kind::Or: {
        const auto a = extension(f.lhs());
        const auto& b = extension(f.rhs());
        for (NodeId x = 0; x < m_.size(); ++x) e[x] = a[x] || b[x];
        break;
      }
      case Kind::Imp:
      case Kind::Arrow: {
        const auto a = extension(f.lhs());
        const auto& b = extension(f.rhs());
        const auto& succ = f.is(Kind::Imp) ? up_ : sc_;
        for (NodeId x = 0; x < m_.size(); ++x) {
          bool ok = true;
          for (NodeId y : succ[x])
            if (a[y] && !b[y]) {
              ok = false;
              break;
            }
          e[x] = ok;
        }
        break;
      }
      case Kind::Box: {
        const auto& b = extension(f.body());
        for (NodeId x = 0; x < m_.size(); ++x) {
          bool ok = true;
          for (NodeId y : sc_[x])
            if (!b[y]) {
              ok = false;
              break;
            }
          e[x] = ok;
        }
        break;
      }
      case Kind::Star:
      case Kind::Fix: throw error("forcing is undefined for fixpoint syntax; eliminate binders first");
    }
    return memo_.emplace(f, std::move(e)).first->second;
  }

  bool forces(NodeId x, const Formula& f) {
    m_.check_node(x);
    return extension(f)[x];
  }

  const std::vector<std::vector<NodeId>>& up() const { return up_; }
  const std::vector<std::vector<NodeId>>& sc() const { return sc_; }

 private:
  const KripkeModel& m_;
  std::vector<std::vector<NodeId>> up_, sc_;
  std::unordered_map<Formula, std::vector<char>> memo_;
};

inline bool forces(const KripkeModel& m, NodeId x, const Formula& f) {
  Evaluator ev(m);
  return ev.forces(x, f);
}

/// Members of `X` forced at `x`, in the order of `X`.
inline std::vector<Formula> node_theory(const KripkeModel& m, NodeId x, const std::vector<Formula>& X) {
  Evaluator ev(m);
  std::vector<Formula> out;
  for (const Formula& f : X)
    if (ev.forces(x, f)) out.push_back(f);
  return out;
}

// ---------------------------------------------------------------------------
// Enumeration

namespace detail {

struct FrameShape {
  std::size_t n;
  std::vector<std::vector<char>> pre, sub;
  std::vector<std::vector<char>> upsets;  // monotone subsets of nodes
};

inline std::vector<FrameShape> frame_shapes(std::size_t n, FrameClass cls) {
  std::vector<FrameShape> out;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  // Only orders refining the index order; every finite order has such a copy.
  for (std::uint64_t pm = 0; pm < (std::uint64_t{1} << pairs.size()); ++pm) {
    std::vector<std::vector<char>> pre(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) pre[i][i] = 1;
    for (std::size_t k = 0; k < pairs.size(); ++k)
      if (pm >> k & 1) pre[pairs[k].first][pairs[k].second] = 1;
    bool trans = true;
    for (std::size_t a = 0; a < n && trans; ++a)
      for (std::size_t b = 0; b < n && trans; ++b)
        for (std::size_t c = 0; c < n && trans; ++c)
          if (pre[a][b] && pre[b][c] && !pre[a][c]) trans = false;
    if (!trans) continue;
    std::vector<std::pair<std::size_t, std::size_t>> strict;
    for (auto [a, b] : pairs)
      if (pre[a][b]) strict.emplace_back(a, b);
    std::vector<std::vector<char>> upsets;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
      bool ok = true;
      for (std::size_t a = 0; a < n && ok; ++a)
        for (std::size_t b = 0; b < n && ok; ++b)
          if (pre[a][b] && (s >> a & 1) && !(s >> b & 1)) ok = false;
      if (!ok) continue;
      std::vector<char> u(n);
      for (std::size_t a = 0; a < n; ++a) u[a] = s >> a & 1;
      upsets.push_back(std::move(u));
    }
    for (std::uint64_t sm = 0; sm < (std::uint64_t{1} << strict.size()); ++sm) {
      std::vector<std::vector<char>> sub(n, std::vector<char>(n, 0));
      for (std::size_t k = 0; k < strict.size(); ++k)
        if (sm >> k & 1) sub[strict[k].first][strict[k].second] = 1;
      bool ok = true;
      for (std::size_t x = 0; x < n && ok; ++x)
        for (std::size_t y = 0; y < n && ok; ++y)
          for (std::size_t z = 0; z < n && ok; ++z) {
            if (pre[x][y] && sub[y][z] && !sub[x][z]) ok = false;
            if (cls == FrameClass::brilliant && sub[x][y] && pre[y][z] && !sub[x][z]) ok = false;
          }
      if (ok) out.push_back({n, pre, sub, upsets});
    }
  }
  return out;
}

}  // namespace detail

/// Streams every model over `vars` with 1..maxNodes nodes, in a fixed order.
/// Renamed copies may occur. The callback returns false to stop early.
inline void for_each_model(const VariableSet& vars, std::size_t max_nodes, FrameClass cls,
                           const std::function<bool(const KripkeModel&)>& fn, std::size_t budget = 4) {
  if (max_nodes > budget)
    throw budget_exceeded("model enumeration limited to " + std::to_string(budget) + " nodes");
  const std::vector<std::string> vs(vars.begin(), vars.end());
  for (std::size_t n = 1; n <= max_nodes; ++n) {
    for (const auto& shape : detail::frame_shapes(n, cls)) {
      KripkeModel m = KripkeModel::with_nodes(n, vars);
      m.pre = shape.pre;
      m.sub = shape.sub;
      m.root = 0;
      std::vector<std::size_t> choice(vs.size(), 0);
      while (true) {
        for (std::size_t x = 0; x < n; ++x) m.val[x].clear();
        for (std::size_t k = 0; k < vs.size(); ++k)
          for (std::size_t x = 0; x < n; ++x)
            if (shape.upsets[choice[k]][x]) m.val[x].insert(vs[k]);
        if (!fn(m)) return;
        std::size_t k = 0;
        while (k < vs.size() && ++choice[k] == shape.upsets.size()) choice[k++] = 0;
        if (k == vs.size()) break;
      }
    }
  }
}

inline std::vector<KripkeModel> enumerate_models(const VariableSet& vars, std::size_t max_nodes, FrameClass cls,
                                                 std::size_t budget = 4) {
  std::vector<KripkeModel> out;
  for_each_model(vars, max_nodes, cls, [&](const KripkeModel& m) {
    out.push_back(m);
    return true;
  }, budget);
  return out;
}

/// Shared read-only cache of enumerated models, keyed by arguments.
inline const std::vector<KripkeModel>& cached_models(const VariableSet& vars, std::size_t max_nodes, FrameClass cls,
                                                     std::size_t budget = 4) {
  static std::mutex mu;
  static std::map<std::tuple<VariableSet, std::size_t, int>, std::unique_ptr<std::vector<KripkeModel>>> cache;
  std::lock_guard lock(mu);
  auto key = std::make_tuple(vars, max_nodes, static_cast<int>(cls));
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<std::vector<KripkeModel>>(enumerate_models(vars, max_nodes, cls, budget));
  return *slot;
}

/// Submodel on the nodes flagged in `keep` (order preserved). Every frame
/// condition is universal, so restriction keeps validity.
inline KripkeModel restrict_model(const KripkeModel& m, const std::vector<char>& keep) {
  KripkeModel out;
  out.vars = m.vars;
  std::vector<NodeId> idx;
  for (NodeId x = 0; x < m.size(); ++x)
    if (keep[x]) {
      idx.push_back(x);
      out.add_node(m.nodes[x]);
    }
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out.val[i] = m.val[idx[i]];
    for (std::size_t j = 0; j < idx.size(); ++j) {
      out.pre[i][j] = m.pre[idx[i]][idx[j]];
      out.sub[i][j] = m.sub[idx[i]][idx[j]];
    }
    if (m.root && *m.root == idx[i]) out.root = i;
  }
  return out;
}

/// Disjoint union; nodes of `b` are renamed with a prefix when names clash.
inline KripkeModel disjoint_union(const KripkeModel& a, const KripkeModel& b) {
  KripkeModel m;
  m.vars = a.vars;
  m.vars.insert(b.vars.begin(), b.vars.end());
  for (const auto& src : {&a, &b}) {
    const std::size_t off = m.size();
    for (NodeId i = 0; i < src->size(); ++i) {
      std::string name = src->nodes[i];
      if (src == &b) name = "m:" + name;
      else name = "k:" + name;
      m.add_node(std::move(name));
    }
    for (NodeId i = 0; i < src->size(); ++i) {
      m.val[off + i] = src->val[i];
      for (NodeId j = 0; j < src->size(); ++j) {
        m.pre[off + i][off + j] = src->pre[i][j];
        m.sub[off + i][off + j] = src->sub[i][j];
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json model_to_json(const KripkeModel& m) {
  using nlohmann::json;
  json j;
  j["vars"] = json::array();
  for (const auto& v : m.vars) j["vars"].push_back(v);
  j["nodes"] = m.nodes;
  j["pre"] = json::array();
  j["sub"] = json::array();
  for (NodeId x = 0; x < m.size(); ++x)
    for (NodeId y = 0; y < m.size(); ++y) {
      if (m.pre[x][y]) j["pre"].push_back({m.nodes[x], m.nodes[y]});
      if (m.sub[x][y]) j["sub"].push_back({m.nodes[x], m.nodes[y]});
    }
  j["val"] = json::object();
  for (NodeId x = 0; x < m.size(); ++x) {
    json vs = json::array();
    for (const auto& v : m.val[x]) vs.push_back(v);
    j["val"][m.nodes[x]] = vs;
  }
  if (m.root) j["root"] = m.nodes[*m.root];
  return j;
}

namespace detail {
inline std::string node_name(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw error("node identifiers must be strings or integers");
}
}  // namespace detail

inline KripkeModel model_from_json(const nlohmann::json& j) {
  KripkeModel m;
  try {
    for (const auto& v : j.at("vars")) m.vars.insert(v.get<std::string>());
    for (const auto& n : j.at("nodes")) m.add_node(detail::node_name(n));
    auto edges = [&](const char* key, std::vector<std::vector<char>>& rel) {
      if (!j.contains(key)) return;
      for (const auto& e : j.at(key)) {
        if (!e.is_array() || e.size() != 2) throw error(std::string("malformed edge in '") + key + "'");
        rel[m.index_of(detail::node_name(e[0]))][m.index_of(detail::node_name(e[1]))] = 1;
      }
    };
    edges("pre", m.pre);
    edges("sub", m.sub);
    if (j.contains("val"))
      for (const auto& [node, vs] : j.at("val").items())
        for (const auto& v : vs) m.val[m.index_of(node)].insert(v.get<std::string>());
    if (j.contains("root") && !j.at("root").is_null()) m.root = m.index_of(detail::node_name(j.at("root")));
  } catch (const nlohmann::json::exception& e) {
    throw error(std::string("malformed model JSON: ") + e.what());
  }
  return m;
}

/// DOT rendering: solid edges for sub, dashed for the covering pairs of pre.
inline std::string model_to_dot(const KripkeModel& m) {
  std::ostringstream os;
  os << "digraph model {\n";
  for (NodeId x = 0; x < m.size(); ++x) {
    os << "  n" << x << " [label=\"" << m.nodes[x];
    if (!m.val[x].empty()) {
      os << "\\n";
      bool first = true;
      for (const auto& v : m.val[x]) {
        os << (first ? "" : ",") << v;
        first = false;
      }
    }
    os << "\"" << (m.root && *m.root == x ? ", peripheries=2" : "") << "];\n";
  }
  for (NodeId x = 0; x < m.size(); ++x)
    for (NodeId y = 0; y < m.size(); ++y) {
      if (x == y || !m.pre[x][y]) continue;
      bool covered = true;
      for (NodeId z = 0; z < m.size(); ++z)
        if (z != x && z != y && m.pre[x][z] && m.pre[z][y]) covered = false;
      if (covered) os << "  n" << x << " -> n" << y << " [style=dashed];\n";
    }
  for (NodeId x = 0; x < m.size(); ++x)
    for (NodeId y = 0; y < m.size(); ++y)
      if (m.sub[x][y]) os << "  n" << x << " -> n" << y << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace islkit
