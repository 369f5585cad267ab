#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fh/error.hpp"
#include "fh/family.hpp"
#include "fh/space.hpp"
#include "fh/tree.hpp"

namespace fh {

struct Budget {
  std::uint64_t max_nodes = 200000;  // candidate-set assignments explored
  int max_depth = 8;                 // layer nesting allowed in the search
};

/// Three-valued: exhaustive search distinguishes a definite no from running
/// out of budget.
struct MembershipResult {
  enum class Status { member, non_member, unknown } status;
  std::optional<TFamily> witness;  // present iff member
  std::uint64_t nodes_explored = 0;

  bool is_member() const { return status == Status::member; }
};

/// Checks that a concrete family places A at the tree's position: valid over
/// the handle's level structure, shape equivalent to T, determining A.
inline bool verify_membership(const TFamily& f, const IterTree& shape,
                              const KPartition& a) {
  if (f.space != a.space) return false;
  if (!h_equiv(f.shape, shape)) return false;
  ValidationReport rep = validate(f);
  if (!rep.wellformed || !rep.monotone) return false;
  DetermineResult d = determine(f);
  return d && *d.partition == a;
}

namespace detail {

struct SearchCtx {
  const KPartition* a = nullptr;
  const SpaceModel* space = nullptr;
  Budget budget;
  std::uint64_t nodes = 0;

  void tick() {
    if (++nodes > budget.max_nodes) throw budget_exceeded("witness search budget");
  }
};

// Searches a sub-family over `layer_tree` whose layer sits at base level
// `level`, confined to `window`, such that its determined values match a on
// all of window. Writes sets under `prefix` into `out` on success.
inline bool search_layer(SearchCtx& ctx, const IterTree& layer_tree,
                         const FamilyPath& prefix, std::uint64_t window, int level,
                         std::map<FamilyPath, SetRep>& out);

// Assigns sets to this layer's nodes in preorder (root gets the window), then
// checks terminating components against a and recurses into the rest.
inline bool assign_nodes(SearchCtx& ctx,
                         const std::vector<std::pair<NodeAddr, const IterTree*>>& nodes,
                         std::size_t idx, const IterTree& layer_tree,
                         const FamilyPath& prefix, std::uint64_t window, int level,
                         std::map<FamilyPath, SetRep>& out) {
  if (idx == nodes.size()) {
    // Layer complete: components must carry a on terminating nodes and admit
    // witnessing sub-families elsewhere.
    TFamily probe;
    probe.shape = layer_tree;  // only the tilde computation below uses this
    probe.space = ctx.space;
    for (const auto& [addr, label] : nodes) {
      FamilyPath p = prefix;
      p.push_back(addr);
      probe.sets[FamilyPath{addr}] = out.at(p);
    }
    for (const auto& [addr, label] : nodes) {
      FamilyPath p = prefix;
      p.push_back(addr);
      std::uint64_t comp = tilde(probe, FamilyPath{addr}).bits;
      if (collapses_to_base(*label)) {
        int v = collapsed_base_label(*label);
        for (std::size_t x = 0; x < ctx.a->values.size(); ++x)
          if ((comp >> x) & 1 && (*ctx.a)(x) != v) return false;
      } else {
        if (static_cast<int>(p.size()) >= ctx.budget.max_depth)
          throw budget_exceeded("witness search depth");
        FamilyPath root = p;
        root.push_back({});
        out[root] = make_set(*ctx.space, comp);
        if (!search_layer(ctx, *label, p, comp, level + 1, out)) {
          // Erase the failed sub-family before trying other assignments.
          for (auto it = out.begin(); it != out.end();) {
            const FamilyPath& q = it->first;
            if (q.size() > p.size() &&
                std::equal(p.begin(), p.end(), q.begin()))
              it = out.erase(it);
            else
              ++it;
          }
          return false;
        }
      }
    }
    return true;
  }

  const auto& [addr, label] = nodes[idx];
  FamilyPath p = prefix;
  p.push_back(addr);
  if (addr.empty()) {
    out[p] = make_set(*ctx.space, window);
    if (assign_nodes(ctx, nodes, idx + 1, layer_tree, prefix, window, level, out))
      return true;
    out.erase(p);
    return false;
  }
  // Candidates: level sets below the parent's set. Monotone families suffice.
  NodeAddr parent_addr(addr.begin(), addr.end() - 1);
  FamilyPath pp = prefix;
  pp.push_back(parent_addr);
  std::uint64_t parent = out.at(pp).bits;
  if (level == 0 && ctx.space->is_poset()) {
    for (std::uint64_t m : enumerate_opens(*ctx.space)) {
      ctx.tick();
      if ((m & ~parent) != 0) continue;
      out[p] = make_set(*ctx.space, m);
      if (assign_nodes(ctx, nodes, idx + 1, layer_tree, prefix, window, level, out))
        return true;
    }
  } else {
    // Level >= 1 (or cylinder): every subset of the parent qualifies.
    std::uint64_t sub = 0;
    while (true) {
      ctx.tick();
      out[p] = make_set(*ctx.space, sub);
      if (assign_nodes(ctx, nodes, idx + 1, layer_tree, prefix, window, level, out))
        return true;
      if (sub == parent) break;
      sub = (sub - parent) & parent;
    }
  }
  out.erase(p);
  return false;
}

inline bool search_layer(SearchCtx& ctx, const IterTree& layer_tree,
                         const FamilyPath& prefix, std::uint64_t window, int level,
                         std::map<FamilyPath, SetRep>& out) {
  auto nodes = layer_nodes(layer_tree);
  return assign_nodes(ctx, nodes, 0, layer_tree, prefix, window, level, out);
}

}  // namespace detail

/// Exhaustive witness search for A at position T over the space's base.
/// Sound and complete within budget on these finite models: monotone
/// families with nested windows exhaust the class.
inline MembershipResult search_witness(const KPartition& a, const IterTree& shape,
                                       const Budget& budget = {}) {
  MembershipResult res{MembershipResult::Status::non_member, std::nullopt, 0};
  detail::SearchCtx ctx;
  ctx.a = &a;
  ctx.space = a.space;
  ctx.budget = budget;
  if (shape.arity() != a.k) throw domain_error("tree arity differs from partition arity");
  std::map<FamilyPath, SetRep> sets;
  try {
    if (detail::search_layer(ctx, shape, {}, a.space->all_points(), 0, sets)) {
      TFamily f;
      f.shape = shape;
      f.space = a.space;
      f.sets = std::move(sets);
      res.status = MembershipResult::Status::member;
      res.witness = std::move(f);
    }
  } catch (const budget_exceeded&) {
    res.status = MembershipResult::Status::unknown;
  }
  res.nodes_explored = ctx.nodes;
  return res;
}

/// Membership verdict of A for every tree in `trees`, plus the h-minimal
/// positions among the definite members and an audit that membership was
/// upward closed across the sample.
struct Classification {
  std::vector<MembershipResult::Status> verdicts;
  std::vector<std::size_t> minimal_members;  // indices into trees
  bool upward_closed = true;
  std::optional<std::pair<std::size_t, std::size_t>> closure_violation;
};

inline Classification classify(const KPartition& a, const std::vector<IterTree>& trees,
                               const Budget& budget = {}) {
  Classification c;
  c.verdicts.reserve(trees.size());
  for (const auto& t : trees) c.verdicts.push_back(search_witness(a, t, budget).status);
  auto member = [&](std::size_t i) {
    return c.verdicts[i] == MembershipResult::Status::member;
  };
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (!member(i)) continue;
    bool minimal = true;
    for (std::size_t j = 0; j < trees.size(); ++j) {
      if (j == i || !member(j)) continue;
      if (h_leq(trees[j], trees[i]).holds && !h_leq(trees[i], trees[j]).holds)
        minimal = false;
    }
    if (minimal) c.minimal_members.push_back(i);
  }
  for (std::size_t i = 0; i < trees.size() && c.upward_closed; ++i)
    for (std::size_t j = 0; j < trees.size(); ++j)
      if (member(i) && c.verdicts[j] == MembershipResult::Status::non_member &&
          h_leq(trees[i], trees[j]).holds) {
        c.upward_closed = false;
        c.closure_violation = {i, j};
        break;
      }
  return c;
}

// ---- non-collapse witnesses ----

/// A desk-scale separating instance: a partition lying at the position of T
/// but not of S. Owns its space. Only alternating 2-label chains are covered;
/// anything else reports unavailable with the reason.
struct NoncollapseWitness {
  bool available = false;
  std::string explanation;
  std::shared_ptr<SpaceModel> space;
  std::vector<int> values;
  IterTree in_tree = IterTree::base(0, 2);    // witnessed position
  IterTree not_in_tree = IterTree::base(0, 2);

  KPartition partition() const { return KPartition{space.get(), values, 2}; }
};

namespace detail {

// Labels along a chain-shaped tree whose labels are all base values; empty
// optional when t is not of that shape.
inline std::optional<std::vector<int>> chain_labels(const IterTree& t) {
  std::vector<int> out;
  const IterTree* cur = &t;
  while (true) {
    if (!collapses_to_base(cur->is_base() ? *cur : cur->label()))
      return std::nullopt;
    out.push_back(collapsed_base_label(cur->is_base() ? *cur : cur->label()));
    if (cur->is_base() || cur->children().empty()) break;
    if (cur->children().size() != 1) return std::nullopt;
    cur = &cur->children()[0];
  }
  return out;
}

inline bool alternating(const std::vector<int>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] == v[i - 1]) return false;
  return true;
}

}  // namespace detail

/// A linear order c_0 < c_1 < ... < c_{m-1} as a poset model; its opens are
/// the final segments.
inline SpaceModel chain_space(int m) {
  std::vector<std::string> names;
  std::vector<std::pair<int, int>> covers;
  for (int i = 0; i < m; ++i) names.push_back("c" + std::to_string(i));
  for (int i = 0; i + 1 < m; ++i) covers.emplace_back(i, i + 1);
  return SpaceModel::poset(std::move(names), covers);
}

/// Separates the positions of two alternating chains t (longer) and s: on a
/// linear poset of t's length, the partition alternating along the chain lies
/// at t's position and, by exhaustive search, at no position h-below s.
inline NoncollapseWitness noncollapse_witness(const IterTree& t, const IterTree& s) {
  NoncollapseWitness w;
  w.in_tree = t;
  w.not_in_tree = s;
  if (t.arity() != 2 || s.arity() != 2) {
    w.explanation = "only 2-label chains are supported";
    return w;
  }
  auto lt = detail::chain_labels(t);
  auto ls = detail::chain_labels(s);
  if (!lt || !ls || !detail::alternating(*lt) || !detail::alternating(*ls)) {
    w.explanation = "both trees must be alternating chains of base labels";
    return w;
  }
  if (h_leq(t, s).holds) {
    w.explanation = "first chain embeds into the second; nothing to separate";
    return w;
  }
  const int m = static_cast<int>(lt->size());
  w.space = std::make_shared<SpaceModel>(chain_space(m));
  // Point c_i gets the chain's i-th label, read from the root downward.
  w.values.assign(m, 0);
  for (int i = 0; i < m; ++i) w.values[i] = (*lt)[i];
  KPartition a = w.partition();
  MembershipResult in = search_witness(a, t);
  MembershipResult out = search_witness(a, s);
  if (!in.is_member() || out.status != MembershipResult::Status::non_member) {
    w.explanation = "internal check failed on the constructed chain";
    w.space.reset();
    return w;
  }
  w.available = true;
  w.explanation = "alternating partition on a " + std::to_string(m) +
                  "-point linear order";
  return w;
}

}  // namespace fh
