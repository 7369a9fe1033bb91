#pragma once

// Hash-consed formula trees for the arrow language, the box language and the
// single-binder fixpoint extension.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace islkit {

/// Constructor tags, listed in canonical rank order.
enum class Kind : std::uint8_t { Bot, Top, Var, Star, And, Or, Imp, Arrow, Box, Fix };

inline constexpr bool is_binary(Kind k) {
  return k == Kind::And || k == Kind::Or || k == Kind::Imp || k == Kind::Arrow;
}
inline constexpr bool is_unary(Kind k) { return k == Kind::Box || k == Kind::Fix; }

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computation would exceed a configured budget.
class budget_exceeded : public error {
 public:
  using error::error;
};

namespace detail {

struct Node {
  Kind kind;
  std::string name;  // Var only
  const Node* lhs = nullptr;
  const Node* rhs = nullptr;
  std::size_t hash = 0;
  std::size_t size = 1;
  std::size_t depth = 1;
  bool has_var = false;
  bool has_star = false;
  bool has_fix = false;
  bool has_box = false;
  bool has_arrow = false;
};

struct NodeKeyHash {
  std::size_t operator()(const Node* n) const { return n->hash; }
};
struct NodeKeyEq {
  bool operator()(const Node* a, const Node* b) const {
    return a->kind == b->kind && a->lhs == b->lhs && a->rhs == b->rhs && a->name == b->name;
  }
};

class InternTable {
 public:
  const Node* intern(Node&& proto) {
    std::lock_guard lock(mu_);
    if (auto it = index_.find(&proto); it != index_.end()) return *it;
    storage_.push_back(std::move(proto));
    const Node* stored = &storage_.back();
    index_.insert(stored);
    return stored;
  }

  static InternTable& instance() {
    static InternTable table;
    return table;
  }

 private:
  std::mutex mu_;
  std::deque<Node> storage_;
  std::unordered_set<const Node*, NodeKeyHash, NodeKeyEq> index_;
};

inline std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace detail

/// Immutable formula handle. Structurally equal formulas share one node, so
/// equality and hashing are O(1).
class Formula {
 public:
  Formula() : node_(bot().node_) {}

  static Formula bot() { return make(Kind::Bot, {}, nullptr, nullptr); }
  static Formula top() { return make(Kind::Top, {}, nullptr, nullptr); }
  static Formula star() { return make(Kind::Star, {}, nullptr, nullptr); }
  static Formula var(std::string_view name) {
    if (name.empty()) throw error("empty variable name");
    return make(Kind::Var, std::string(name), nullptr, nullptr);
  }
  static Formula conj(Formula a, Formula b) { return make(Kind::And, {}, a.node_, b.node_); }
  static Formula disj(Formula a, Formula b) { return make(Kind::Or, {}, a.node_, b.node_); }
  static Formula imp(Formula a, Formula b) { return make(Kind::Imp, {}, a.node_, b.node_); }
  static Formula arrow(Formula a, Formula b) { return make(Kind::Arrow, {}, a.node_, b.node_); }
  static Formula box(Formula a) { return make(Kind::Box, {}, a.node_, nullptr); }
  static Formula fix(Formula a) { return make(Kind::Fix, {}, a.node_, nullptr); }
  static Formula make_binary(Kind k, Formula a, Formula b) { return make(k, {}, a.node_, b.node_); }
  static Formula make_unary(Kind k, Formula a) { return make(k, {}, a.node_, nullptr); }

  // Derived constructors.
  static Formula neg(Formula a) { return imp(a, bot()); }
  static Formula iff(Formula a, Formula b) { return conj(imp(a, b), imp(b, a)); }
  static Formula arrow_iff(Formula a, Formula b) { return conj(arrow(a, b), arrow(b, a)); }
  /// `top ~> a`, the box of the arrow language.
  static Formula lbox(Formula a) { return arrow(top(), a); }

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  Formula lhs() const { return Formula(node_->lhs); }
  Formula rhs() const { return Formula(node_->rhs); }
  Formula body() const { return Formula(node_->lhs); }

  std::size_t size() const { return node_->size; }
  std::size_t depth() const { return node_->depth; }
  std::size_t hash() const { return node_->hash; }
  bool has_var() const { return node_->has_var; }
  bool has_star() const { return node_->has_star; }
  bool has_fix() const { return node_->has_fix; }
  bool has_box() const { return node_->has_box; }
  bool has_arrow() const { return node_->has_arrow; }

  bool is(Kind k) const { return node_->kind == k; }
  bool is_atom() const { return is(Kind::Bot) || is(Kind::Top) || is(Kind::Var) || is(Kind::Star); }
  const void* id() const { return node_; }

  friend bool operator==(const Formula& a, const Formula& b) { return a.node_ == b.node_; }

  /// Canonical total order: constructor rank, then children left to right,
  /// then variable names.
  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
    return compare(a.node_, b.node_);
  }

 private:
  explicit Formula(const detail::Node* n) : node_(n) {}

  static std::strong_ordering compare(const detail::Node* a, const detail::Node* b) {
    while (true) {
      if (a == b) return std::strong_ordering::equal;
      if (auto c = a->kind <=> b->kind; c != 0) return c;
      if (a->kind == Kind::Var) return a->name.compare(b->name) <=> 0;
      if (a->lhs != b->lhs) {
        if (auto c = compare(a->lhs, b->lhs); c != 0) return c;
      }
      if (!a->rhs) return std::strong_ordering::equal;
      a = a->rhs;
      b = b->rhs;
    }
  }

  static Formula make(Kind k, std::string name, const detail::Node* l, const detail::Node* r) {
    detail::Node n;
    n.kind = k;
    n.name = std::move(name);
    n.lhs = l;
    n.rhs = r;
    std::size_t h = detail::mix(0x51ed27u, static_cast<std::size_t>(k));
    if (k == Kind::Var) h = detail::mix(h, std::hash<std::string>{}(n.name));
    n.has_var = k == Kind::Var;
    n.has_star = k == Kind::Star;
    n.has_fix = k == Kind::Fix;
    n.has_box = k == Kind::Box;
    n.has_arrow = k == Kind::Arrow;
    for (const detail::Node* c : {l, r}) {
      if (!c) continue;
      h = detail::mix(h, c->hash);
      n.size += c->size;
      n.depth = std::max(n.depth, c->depth + 1);
      n.has_var |= c->has_var;
      n.has_star |= c->has_star;
      n.has_fix |= c->has_fix;
      n.has_box |= c->has_box;
      n.has_arrow |= c->has_arrow;
    }
    n.hash = h;
    return Formula(detail::InternTable::instance().intern(std::move(n)));
  }

  const detail::Node* node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

/// Order used for closures and adequate sets: smaller formulas first, ties by
/// canonical order. Every formula comes after its proper subformulas.
struct BySizeThenCanonical {
  bool operator()(const Formula& a, const Formula& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

/// Right-nested conjunction in the given order; the empty meet is `top`.
inline Formula big_and(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::top();
  Formula acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = Formula::conj(fs[i], acc);
  return acc;
}

/// Right-nested disjunction; the empty join is `bot`.
inline Formula big_or(const std::vector<Formula>& fs) {
  if (fs.empty()) return Formula::bot();
  Formula acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) acc = Formula::disj(fs[i], acc);
  return acc;
}

}  // namespace islkit

template <>
struct std::hash<islkit::Formula> {
  std::size_t operator()(const islkit::Formula& f) const { return f.hash(); }
};
