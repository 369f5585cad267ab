#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fh/error.hpp"

namespace fh {

/// Address of a node inside a finite ordered tree: child indices from the root.
using NodeAddr = std::vector<int>;

/// Iterated labeled tree: either a base label i < k, or a node whose label is
/// itself an iterated tree one universe lower, with finitely many children.
/// Child order carries no meaning; the h-preorder is invariant under it.
class IterTree {
 public:
  static IterTree base(int label, int k) {
    if (k < 2) throw domain_error("arity must be >= 2");
    if (label < 0 || label >= k) throw domain_error("base label out of range");
    IterTree t;
    t.k_ = k;
    t.base_ = label;
    return t;
  }

  static IterTree node(IterTree label, std::vector<IterTree> children) {
    IterTree t;
    t.k_ = label.k_;
    for (const auto& c : children)
      if (c.k_ != t.k_) throw domain_error("mixed arities in one tree");
    t.label_ = std::make_shared<IterTree>(std::move(label));
    t.children_ = std::move(children);
    return t;
  }

  int arity() const { return k_; }
  bool is_base() const { return label_ == nullptr; }
  int base_label() const { return base_; }
  const IterTree& label() const { return *label_; }
  const std::vector<IterTree>& children() const { return children_; }

  /// Nodes in the top-layer tree; a base label counts as a single node.
  int node_count() const {
    if (is_base()) return 1;
    int n = 1;
    for (const auto& c : children_) n += c.node_count();
    return n;
  }

 private:
  IterTree() = default;
  int k_ = 2;
  int base_ = -1;
  std::shared_ptr<IterTree> label_;  // null for base labels
  std::vector<IterTree> children_;
};

/// The singleton-tree embedding s: wraps t as the label of a childless node.
inline IterTree s_embed(const IterTree& t) { return IterTree::node(t, {}); }

namespace detail {

// True iff t is a base label wrapped in zero or more childless singletons,
// i.e. t is identified with an element of the base antichain.
inline bool collapses_to_base(const IterTree& t) {
  if (t.is_base()) return true;
  return t.children().empty() && collapses_to_base(t.label());
}

inline int collapsed_base_label(const IterTree& t) {
  return t.is_base() ? t.base_label() : collapsed_base_label(t.label());
}

}  // namespace detail

/// Least n such that t lives in the n-th tree universe, under the
/// identification of base elements with their iterated singleton trees.
inline int iter_level(const IterTree& t) {
  if (detail::collapses_to_base(t)) return 0;
  // Max level among the labels of all nodes of the top-layer tree, plus one.
  int m = 0;
  std::vector<const IterTree*> stack{&t};
  while (!stack.empty()) {
    const IterTree* cur = stack.back();
    stack.pop_back();
    if (!cur->is_base()) {
      m = std::max(m, iter_level(cur->label()));
      for (const auto& c : cur->children()) stack.push_back(&c);
    }
  }
  return m + 1;
}

/// Monotone map witnessing t <=_h s: node addresses of t to node addresses of s.
struct HWitness {
  std::map<NodeAddr, NodeAddr> map;
};

struct HResult {
  bool holds = false;
  std::optional<HWitness> witness;
};

namespace detail {

// Flat view of the top-layer tree: one entry per node, preorder.
struct QView {
  struct Node {
    const IterTree* label;
    NodeAddr addr;
    int parent;               // -1 for root
    std::vector<int> kids;    // indices into nodes
    int subtree_end;          // nodes[i..subtree_end) is the subtree of i
  };
  std::vector<Node> nodes;

  static QView of(const IterTree& t) {
    QView v;
    // A base label is viewed as its singleton tree.
    build(v, t, {}, -1);
    return v;
  }

 private:
  static const IterTree* self_label(const IterTree& t) {
    return t.is_base() ? &t : &t.label();
  }
  static void build(QView& v, const IterTree& t, NodeAddr addr, int parent) {
    int idx = static_cast<int>(v.nodes.size());
    v.nodes.push_back({self_label(t), addr, parent, {}, -1});
    if (parent >= 0) v.nodes[parent].kids.push_back(idx);
    if (!t.is_base()) {
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        NodeAddr a = addr;
        a.push_back(static_cast<int>(i));
        build(v, t.children()[i], std::move(a), idx);
      }
    }
    v.nodes[idx].subtree_end = static_cast<int>(v.nodes.size());
  }
};

inline bool h_leq_bool(const IterTree& t, const IterTree& s);

// Decides existence of a monotone label-respecting map of the subtree of T at
// x into the subtree of S rooted at y with x landing exactly on y. Children of
// x are handled independently: the map need not be injective.
struct HSolver {
  const QView& T;
  const QView& S;
  std::vector<signed char> exact;  // memo for the root-pinned relation, -1 unknown

  HSolver(const QView& t, const QView& s)
      : T(t), S(s), exact(t.nodes.size() * s.nodes.size(), -1) {}

  bool pinned(int x, int y) {
    signed char& m = exact[static_cast<std::size_t>(x) * S.nodes.size() + y];
    if (m >= 0) return m != 0;
    m = 0;  // guards against reentry; the relation is acyclic over subtree sizes
    bool ok = h_leq_bool(*T.nodes[x].label, *S.nodes[y].label);
    for (int c : T.nodes[x].kids) {
      if (!ok) break;
      ok = anywhere_below(c, y);
    }
    m = ok ? 1 : 0;
    return ok;
  }

  // Exists y' in the subtree of y (inclusive) with pinned(x, y').
  bool anywhere_below(int x, int y) {
    for (int y2 = y; y2 < S.nodes[y].subtree_end; ++y2)
      if (pinned(x, y2)) return true;
    return false;
  }

  // Reconstructs one witness map; call only after anywhere_below(0, 0).
  void emit(int x, int y, HWitness& w) {
    for (int y2 = y; y2 < S.nodes[y].subtree_end; ++y2) {
      if (!pinned(x, y2)) continue;
      w.map[T.nodes[x].addr] = S.nodes[y2].addr;
      for (int c : T.nodes[x].kids) emit(c, y2, w);
      return;
    }
    throw domain_error("witness reconstruction failed");  // unreachable
  }
};

inline bool h_leq_bool(const IterTree& t, const IterTree& s) {
  if (collapses_to_base(t) && collapses_to_base(s))
    return collapsed_base_label(t) == collapsed_base_label(s);
  QView vt = QView::of(t);
  QView vs = QView::of(s);
  HSolver solver(vt, vs);
  return solver.anywhere_below(0, 0);
}

}  // namespace detail

/// h-preorder decision: does a monotone map f with t(x) <= s(f(x)) exist?
/// The map may send the root of t anywhere in s. Returns a witness when true.
inline HResult h_leq(const IterTree& t, const IterTree& s) {
  HResult r;
  if (detail::collapses_to_base(t) && detail::collapses_to_base(s)) {
    r.holds = detail::collapsed_base_label(t) == detail::collapsed_base_label(s);
    if (r.holds) {
      HWitness w;
      w.map[{}] = {};
      r.witness = std::move(w);
    }
    return r;
  }
  detail::QView vt = detail::QView::of(t);
  detail::QView vs = detail::QView::of(s);
  detail::HSolver solver(vt, vs);
  r.holds = solver.anywhere_below(0, 0);
  if (r.holds) {
    HWitness w;
    solver.emit(0, 0, w);
    r.witness = std::move(w);
  }
  return r;
}

inline bool h_equiv(const IterTree& t, const IterTree& s) {
  return detail::h_leq_bool(t, s) && detail::h_leq_bool(s, t);
}

/// Swaps the two base labels throughout; the Pi-side companion. k = 2 only.
inline IterTree dual(const IterTree& t) {
  if (t.arity() != 2) throw domain_error("dual requires arity 2");
  if (t.is_base()) return IterTree::base(1 - t.base_label(), 2);
  std::vector<IterTree> kids;
  kids.reserve(t.children().size());
  for (const auto& c : t.children()) kids.push_back(dual(c));
  return IterTree::node(dual(t.label()), std::move(kids));
}

namespace detail {

inline std::string canonical_key(const IterTree& t) {
  if (t.is_base()) return "b" + std::to_string(t.base_label());
  std::vector<std::string> keys;
  keys.reserve(t.children().size());
  for (const auto& c : t.children()) keys.push_back(canonical_key(c));
  std::sort(keys.begin(), keys.end());
  std::string out = "n(" + canonical_key(t.label()) + ";";
  for (const auto& k : keys) out += k + ",";
  out += ")";
  return out;
}

// All trees with exactly `n` nodes over the given label pool, children
// canonicalized (sorted keys, non-decreasing) so each unordered tree appears
// once. `min_key` restricts the root's canonical key for multiset generation.
inline void gen_exact(int n, const std::vector<IterTree>& labels,
                      std::vector<std::pair<std::string, IterTree>>& out);

inline void gen_child_lists(int budget, const std::vector<IterTree>& labels,
                            const std::string& min_key,
                            std::vector<IterTree>& acc,
                            const IterTree& root_label,
                            std::vector<std::pair<std::string, IterTree>>& out) {
  if (budget == 0) {
    out.emplace_back("", IterTree::node(root_label, acc));
    return;
  }
  for (int size = 1; size <= budget; ++size) {
    std::vector<std::pair<std::string, IterTree>> subs;
    gen_exact(size, labels, subs);
    for (auto& [key, sub] : subs) {
      if (key < min_key) continue;
      acc.push_back(sub);
      gen_child_lists(budget - size, labels, key, acc, root_label, out);
      acc.pop_back();
    }
  }
}

inline void gen_exact(int n, const std::vector<IterTree>& labels,
                      std::vector<std::pair<std::string, IterTree>>& out) {
  for (const auto& lab : labels) {
    std::vector<IterTree> acc;
    std::vector<std::pair<std::string, IterTree>> here;
    gen_child_lists(n - 1, labels, "", acc, lab, here);
    for (auto& [k, t] : here) out.emplace_back(canonical_key(t), t);
  }
}

}  // namespace detail

/// All trees of the given universe level with at most max_nodes nodes per
/// layer, one representative per child permutation. Level 0 yields the base
/// antichain itself.
inline std::vector<IterTree> enumerate_trees(int k, int level, int max_nodes) {
  if (level > 2 || max_nodes > 6 || max_nodes < 1)
    throw budget_exceeded("enumerate_trees: level <= 2 and 1 <= max_nodes <= 6");
  std::vector<IterTree> pool;
  for (int i = 0; i < k; ++i) pool.push_back(IterTree::base(i, k));
  for (int l = 1; l <= level; ++l) {
    std::vector<IterTree> next;
    for (int n = 1; n <= max_nodes; ++n) {
      std::vector<std::pair<std::string, IterTree>> batch;
      detail::gen_exact(n, pool, batch);
      for (auto& [key, t] : batch) {
        next.push_back(std::move(t));
        if (next.size() > 2'000'000)
          throw budget_exceeded("enumerate_trees: output too large");
      }
    }
    pool = std::move(next);
  }
  return pool;
}

/// Linearization of a k=2 fragment into ranked h-equivalence classes.
struct LinearizeResult {
  struct Class {
    std::vector<int> members;  // indices into the input list
    int rank = 0;
  };
  std::vector<Class> classes;  // sorted by rank, then by first member
  // Indices of an input pair violating the comparable-or-dual shape, if any.
  std::optional<std::pair<int, int>> violation;
  bool ok() const { return !violation.has_value(); }
};

inline LinearizeResult linearize(const std::vector<IterTree>& ts) {
  for (const auto& t : ts)
    if (t.arity() != 2) throw domain_error("linearize requires arity 2");
  LinearizeResult res;
  const int n = static_cast<int>(ts.size());
  std::vector<std::vector<bool>> leq(n, std::vector<bool>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) leq[i][j] = detail::h_leq_bool(ts[i], ts[j]);

  // Comparable-or-dual precondition on raw pairs.
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (leq[i][j] || leq[j][i]) continue;
      if (!(detail::h_leq_bool(dual(ts[i]), ts[j]) &&
            detail::h_leq_bool(ts[j], dual(ts[i])))) {
        res.violation = {i, j};
        return res;
      }
    }
  }

  // Equivalence classes.
  std::vector<int> cls(n, -1);
  int nc = 0;
  for (int i = 0; i < n; ++i) {
    if (cls[i] >= 0) continue;
    cls[i] = nc;
    for (int j = i + 1; j < n; ++j)
      if (cls[j] < 0 && leq[i][j] && leq[j][i]) cls[j] = nc;
    ++nc;
  }
  std::vector<LinearizeResult::Class> classes(nc);
  for (int i = 0; i < n; ++i) classes[cls[i]].members.push_back(i);

  // Rank = longest strict chain below, computed over class representatives.
  auto strictly_below = [&](int a, int b) {
    int ra = classes[a].members[0], rb = classes[b].members[0];
    return leq[ra][rb] && !leq[rb][ra];
  };
  std::vector<int> rank(nc, -1);
  auto rank_of = [&](auto&& self, int c) -> int {
    if (rank[c] >= 0) return rank[c];
    rank[c] = 0;
    int r = 0;
    for (int o = 0; o < nc; ++o)
      if (o != c && strictly_below(o, c)) r = std::max(r, self(self, o) + 1);
    return rank[c] = r;
  };
  for (int c = 0; c < nc; ++c) classes[c].rank = rank_of(rank_of, c);

  // Shape check: cross-rank pairs comparable, same-rank pairs incomparable,
  // at most two classes (a dual pair) per rank.
  std::map<int, int> per_rank;
  for (int a = 0; a < nc; ++a) {
    ++per_rank[classes[a].rank];
    for (int b = 0; b < nc; ++b) {
      if (a == b) continue;
      int ra = classes[a].members[0], rb = classes[b].members[0];
      bool cmp = leq[ra][rb] || leq[rb][ra];
      if (classes[a].rank == classes[b].rank ? cmp
                                             : (classes[a].rank < classes[b].rank
                                                    ? !leq[ra][rb]
                                                    : !leq[rb][ra])) {
        res.violation = {ra, rb};
        return res;
      }
    }
  }
  for (auto& [r, cnt] : per_rank) {
    if (cnt > 2) {
      // Report two same-rank classes as the violating pair.
      std::vector<int> same;
      for (int c = 0; c < nc; ++c)
        if (classes[c].rank == r) same.push_back(classes[c].members[0]);
      res.violation = {same[0], same[1]};
      return res;
    }
  }

  std::sort(classes.begin(), classes.end(), [](const auto& a, const auto& b) {
    return a.rank != b.rank ? a.rank < b.rank : a.members[0] < b.members[0];
  });
  res.classes = std::move(classes);
  return res;
}

// ---- text format: `0`, `1`, ... for base labels; `node(<label>; c1, c2)` ----

namespace detail {

inline IterTree parse_tree_expr(const std::string& s, std::size_t& i, int k);

inline void skip_tree_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

inline IterTree parse_tree_expr(const std::string& s, std::size_t& i, int k) {
  skip_tree_ws(s, i);
  if (i >= s.size()) throw parse_error("tree: unexpected end of input");
  if (std::isdigit(static_cast<unsigned char>(s[i]))) {
    int v = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
      v = v * 10 + (s[i++] - '0');
    if (v >= k) throw parse_error("tree: base label " + std::to_string(v) +
                                  " out of range for arity " + std::to_string(k));
    return IterTree::base(v, k);
  }
  if (s.compare(i, 4, "node") != 0)
    throw parse_error("tree: expected digit or 'node' at position " + std::to_string(i));
  i += 4;
  skip_tree_ws(s, i);
  if (i >= s.size() || s[i] != '(') throw parse_error("tree: expected '('");
  ++i;
  IterTree label = parse_tree_expr(s, i, k);
  std::vector<IterTree> kids;
  skip_tree_ws(s, i);
  if (i < s.size() && s[i] == ';') {
    ++i;
    skip_tree_ws(s, i);
    while (i < s.size() && s[i] != ')') {
      kids.push_back(parse_tree_expr(s, i, k));
      skip_tree_ws(s, i);
      if (i < s.size() && s[i] == ',') {
        ++i;
        skip_tree_ws(s, i);
      }
    }
  }
  if (i >= s.size() || s[i] != ')') throw parse_error("tree: expected ')'");
  ++i;
  return IterTree::node(std::move(label), std::move(kids));
}

}  // namespace detail

inline IterTree parse_tree(const std::string& s, int k) {
  std::size_t i = 0;
  IterTree t = detail::parse_tree_expr(s, i, k);
  detail::skip_tree_ws(s, i);
  if (i != s.size()) throw parse_error("tree: trailing input");
  return t;
}

inline std::string to_string(const IterTree& t) {
  if (t.is_base()) return std::to_string(t.base_label());
  std::string out = "node(" + to_string(t.label());
  if (!t.children().empty()) {
    out += "; ";
    for (std::size_t i = 0; i < t.children().size(); ++i) {
      if (i) out += ", ";
      out += to_string(t.children()[i]);
    }
  }
  out += ")";
  return out;
}

/// Path tree labeled a0 at the root, a1 below, etc.
inline IterTree chain_tree(const std::vector<int>& labels, int k) {
  if (labels.empty()) throw domain_error("chain_tree: empty label list");
  IterTree t = IterTree::node(IterTree::base(labels.back(), k), {});
  for (int i = static_cast<int>(labels.size()) - 2; i >= 0; --i)
    t = IterTree::node(IterTree::base(labels[i], k), {t});
  return t;
}

}  // namespace fh
