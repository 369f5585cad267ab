#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fh/error.hpp"
#include "fh/space.hpp"
#include "fh/tree.hpp"

namespace fh {

/// Total map from a model's points to {0, ..., k-1}.
struct KPartition {
  const SpaceModel* space = nullptr;
  std::vector<int> values;
  int k = 2;

  int operator()(std::size_t p) const { return values.at(p); }

  bool operator==(const KPartition& o) const {
    return values == o.values && k == o.k;
  }
};

inline KPartition constant_partition(const SpaceModel& space, int value, int k) {
  if (value < 0 || value >= k) throw domain_error("partition value out of range");
  return KPartition{&space, std::vector<int>(space.point_count(), value), k};
}

/// Path through the iterated index structure: the m-th component is a node
/// address within the m-th layer's tree.
using FamilyPath = std::vector<NodeAddr>;

namespace detail {

// Node addresses and labels of the top-layer tree of t (preorder; a base
// label is viewed as its singleton tree).
inline std::vector<std::pair<NodeAddr, const IterTree*>> layer_nodes(const IterTree& t) {
  QView v = QView::of(t);
  std::vector<std::pair<NodeAddr, const IterTree*>> out;
  out.reserve(v.nodes.size());
  for (const auto& n : v.nodes) out.emplace_back(n.addr, n.label);
  return out;
}

// The iterated label reached by following path through shape. Null only on
// invalid paths.
inline const IterTree* label_at(const IterTree& shape, const FamilyPath& path) {
  const IterTree* cur = &shape;
  for (const NodeAddr& addr : path) {
    // Find addr in the top layer of *cur.
    const IterTree* node = cur;
    if (!addr.empty() && node->is_base()) return nullptr;
    for (int child : addr) {
      if (node->is_base() || child < 0 ||
          child >= static_cast<int>(node->children().size()))
        return nullptr;
      node = &node->children()[child];
    }
    cur = node->is_base() ? node : &node->label();
  }
  return cur;
}

inline bool addr_strict_prefix(const NodeAddr& a, const NodeAddr& b) {
  return a.size() < b.size() && std::equal(a.begin(), a.end(), b.begin());
}

inline void valid_paths_impl(const IterTree& shape, const FamilyPath& prefix,
                             std::vector<FamilyPath>& out) {
  for (const auto& [addr, label] : layer_nodes(shape)) {
    FamilyPath p = prefix;
    p.push_back(addr);
    out.push_back(p);
    if (!collapses_to_base(*label)) valid_paths_impl(*label, p, out);
  }
}

}  // namespace detail

/// All index paths of a family with the given shape (every layer's nodes,
/// recursing under non-terminating labels).
inline std::vector<FamilyPath> family_paths(const IterTree& shape) {
  std::vector<FamilyPath> out;
  detail::valid_paths_impl(shape, {}, out);
  return out;
}

/// Does the path end at a node whose iterated label is a base value?
inline bool is_terminating(const IterTree& shape, const FamilyPath& path) {
  const IterTree* l = detail::label_at(shape, path);
  if (!l) throw domain_error("invalid family path");
  return detail::collapses_to_base(*l);
}

inline int terminating_value(const IterTree& shape, const FamilyPath& path) {
  const IterTree* l = detail::label_at(shape, path);
  if (!l || !detail::collapses_to_base(*l))
    throw domain_error("path is not terminating");
  return detail::collapsed_base_label(*l);
}

/// Tree-indexed assignment of base-level sets: one set per family path, layer
/// depth j drawing from level j of the base. Stored flat; the nested
/// (per-component sub-family) structure is recovered through path prefixes.
struct TFamily {
  IterTree shape = IterTree::base(0, 2);
  const SpaceModel* space = nullptr;
  std::map<FamilyPath, SetRep> sets;
};

/// The component of a path: its set minus every strictly deeper set of the
/// same layer.
inline SetRep tilde(const TFamily& f, const FamilyPath& path) {
  auto it = f.sets.find(path);
  if (it == f.sets.end()) throw domain_error("tilde: path not in family");
  std::uint64_t bits = it->second.bits;
  for (const auto& [q, s] : f.sets) {
    if (q.size() != path.size()) continue;
    if (!std::equal(path.begin(), path.end() - 1, q.begin())) continue;
    if (detail::addr_strict_prefix(path.back(), q.back())) bits &= ~s.bits;
  }
  return make_set(*f.space, bits);
}

struct ValidationReport {
  bool wellformed = true;  // structural invariants (paths, containment, levels)
  bool monotone = true;    // additionally monotone per layer (full validity)
  std::vector<std::string> problems;

  void flag(bool structural, std::string msg) {
    (structural ? wellformed : monotone) = false;
    if (structural) monotone = false;
    problems.push_back(std::move(msg));
  }
};

namespace detail {

inline std::string path_str(const FamilyPath& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += "/";
    if (p[i].empty()) {
      out += "e";
    } else {
      for (std::size_t j = 0; j < p[i].size(); ++j) {
        if (j) out += ".";
        out += std::to_string(p[i][j]);
      }
    }
  }
  return out.empty() ? "e" : out;
}

}  // namespace detail

/// Checks the family invariants: every path present, layer roots equal to the
/// enclosing component (the whole space at the top), layer-0 sets open, sets
/// inside their window, and (for full validity) per-layer monotonicity.
inline ValidationReport validate(const TFamily& f) {
  ValidationReport rep;
  auto paths = family_paths(f.shape);
  for (const auto& p : paths)
    if (!f.sets.count(p)) rep.flag(true, "missing path " + detail::path_str(p));
  for (const auto& [p, s] : f.sets) {
    if (std::find(paths.begin(), paths.end(), p) == paths.end())
      rep.flag(true, "extraneous path " + detail::path_str(p));
    else if (s.space != f.space)
      rep.flag(true, "set on a different space at " + detail::path_str(p));
  }
  if (!rep.wellformed) return rep;

  for (const auto& p : paths) {
    const int layer = static_cast<int>(p.size()) - 1;
    const SetRep& s = f.sets.at(p);
    if (layer == 0 && !is_open(s))
      rep.flag(true, "layer-0 set not open at " + detail::path_str(p));
    // Window: the whole space at the top, the prefix component below.
    std::uint64_t window = f.space->all_points();
    if (layer > 0) {
      FamilyPath prefix(p.begin(), p.end() - 1);
      window = tilde(f, prefix).bits;
    }
    if ((s.bits & ~window) != 0)
      rep.flag(true, "set escapes its component window at " + detail::path_str(p));
    if (p.back().empty() && s.bits != window)
      rep.flag(true, "layer root differs from its window at " + detail::path_str(p));
  }
  if (!rep.wellformed) return rep;

  // Monotonicity within each layer.
  for (const auto& [p, s] : f.sets) {
    for (const auto& [q, s2] : f.sets) {
      if (q.size() != p.size()) continue;
      if (!std::equal(p.begin(), p.end() - 1, q.begin())) continue;
      if (detail::addr_strict_prefix(p.back(), q.back()) && !s2.subset_of(s))
        rep.flag(false, "not monotone: " + detail::path_str(q) +
                            " escapes " + detail::path_str(p));
    }
  }
  return rep;
}

/// Layer-wise replacement of each set by the union over its address suffixes.
/// Components are unchanged by this.
inline TFamily monotonize(const TFamily& f) {
  TFamily g = f;
  for (auto& [p, s] : g.sets) {
    std::uint64_t bits = s.bits;
    for (const auto& [q, s2] : f.sets) {
      if (q.size() != p.size()) continue;
      if (!std::equal(p.begin(), p.end() - 1, q.begin())) continue;
      if (detail::addr_strict_prefix(p.back(), q.back())) bits |= s2.bits;
    }
    s = make_set(*f.space, bits);
  }
  return g;
}

/// Monotone with pairwise disjoint sibling sets at every layer.
inline bool is_reduced(const TFamily& f) {
  ValidationReport rep = validate(f);
  if (!rep.monotone) return false;
  for (const auto& [p, s] : f.sets) {
    for (const auto& [q, s2] : f.sets) {
      if (q.size() != p.size() || q <= p) continue;
      if (!std::equal(p.begin(), p.end() - 1, q.begin())) continue;
      const NodeAddr& a = p.back();
      const NodeAddr& b = q.back();
      if (a.size() != b.size() || a.empty()) continue;
      if (!std::equal(a.begin(), a.end() - 1, b.begin())) continue;  // siblings
      if (s.bits & s2.bits) return false;
    }
  }
  return true;
}

namespace detail {

// Reduces one layer (the nodes {prefix + addr}) top-down, shrinking
// descendants into each reduct member, then rebuilds the deeper layers over
// the new components and recurses.
inline void reduce_layer(TFamily& g, const IterTree& layer_tree, const FamilyPath& prefix) {
  const int level = static_cast<int>(prefix.size());
  BaseHandle base = shift_base(*g.space, 0);
  auto nodes = layer_nodes(layer_tree);

  // Top-down over nodes of this layer: reduce the children of each node.
  for (const auto& [addr, label] : nodes) {
    std::vector<NodeAddr> kids;
    for (const auto& [a2, l2] : nodes)
      if (a2.size() == addr.size() + 1 &&
          std::equal(addr.begin(), addr.end(), a2.begin()))
        kids.push_back(a2);
    if (kids.empty()) continue;
    std::vector<SetRep> cs;
    for (const auto& kid : kids) {
      FamilyPath p = prefix;
      p.push_back(kid);
      cs.push_back(g.sets.at(p));
    }
    std::vector<SetRep> rs = reduce_sequence(cs, level, base);
    // Defensive restatement of the reduct contract.
    std::uint64_t cu = 0, ru = 0;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      cu |= cs[i].bits;
      ru |= rs[i].bits;
      if (!rs[i].subset_of(cs[i])) throw domain_error("reduct not contained");
      for (std::size_t j = i + 1; j < cs.size(); ++j)
        if (rs[i].bits & rs[j].bits) throw domain_error("reduct not disjoint");
    }
    if (cu != ru) throw domain_error("reduct changed the union");
    // Install, shrinking every same-layer descendant into its reduct member.
    for (std::size_t i = 0; i < kids.size(); ++i) {
      for (auto& [q, s] : g.sets) {
        if (q.size() != prefix.size() + 1) continue;
        if (!std::equal(prefix.begin(), prefix.end(), q.begin())) continue;
        const NodeAddr& qa = q.back();
        if (qa.size() < kids[i].size() ||
            !std::equal(kids[i].begin(), kids[i].end(), qa.begin()))
          continue;
        s = make_set(*g.space, s.bits & rs[i].bits);
      }
    }
  }

  // Rebuild deeper layers over the new components.
  for (const auto& [addr, label] : nodes) {
    if (collapses_to_base(*label)) continue;
    FamilyPath p = prefix;
    p.push_back(addr);
    std::uint64_t window = tilde(g, p).bits;
    for (auto& [q, s] : g.sets) {
      if (q.size() <= p.size()) continue;
      if (!std::equal(p.begin(), p.end(), q.begin())) continue;
      s = make_set(*g.space, s.bits & window);
    }
    FamilyPath root = p;
    root.push_back({});
    g.sets.at(root) = make_set(*g.space, window);
    reduce_layer(g, *label, p);
  }
}

}  // namespace detail

/// Top-down reduction: monotonizes, then applies the reduction property layer
/// by layer, intersecting descendants with their reduced parents. The output
/// is reduced, its terminating components refine the input's, and it
/// determines the same partition whenever the input determines one.
inline TFamily reduce_family(const TFamily& f) {
  ValidationReport rep = validate(f);
  if (!rep.wellformed) throw domain_error("reduce_family: " + rep.problems.front());
  TFamily g = monotonize(f);
  detail::reduce_layer(g, g.shape, {});
  return g;
}

// ---- determination and evaluation ----

struct DetermineResult {
  std::optional<KPartition> partition;
  // Diagnostics when no partition is determined.
  enum class Failure { none, conflict, uncovered } failure = Failure::none;
  std::size_t point = 0;
  std::vector<int> labels;  // conflicting labels at `point`

  explicit operator bool() const { return partition.has_value(); }
};

/// Collects all terminating components; a partition is determined when they
/// cover the space with consistent labels. Undefined is a value, not an
/// error: the diagnostic names a conflicting or uncovered point.
inline DetermineResult determine(const TFamily& f) {
  DetermineResult res;
  const std::size_t n = f.space->point_count();
  std::vector<std::vector<int>> seen(n);
  int k = f.shape.arity();
  for (const auto& p : family_paths(f.shape)) {
    if (!is_terminating(f.shape, p)) continue;
    int value = terminating_value(f.shape, p);
    SetRep comp = tilde(f, p);
    for (std::size_t x = 0; x < n; ++x)
      if (comp.contains(x)) seen[x].push_back(value);
  }
  std::vector<int> values(n, -1);
  for (std::size_t x = 0; x < n; ++x) {
    std::sort(seen[x].begin(), seen[x].end());
    seen[x].erase(std::unique(seen[x].begin(), seen[x].end()), seen[x].end());
    if (seen[x].empty()) {
      res.failure = DetermineResult::Failure::uncovered;
      res.point = x;
      return res;
    }
    if (seen[x].size() > 1) {
      res.failure = DetermineResult::Failure::conflict;
      res.point = x;
      res.labels = seen[x];
      return res;
    }
    values[x] = seen[x][0];
  }
  res.partition = KPartition{f.space, std::move(values), k};
  return res;
}

struct EvalResult {
  std::vector<int> labels;  // all labels reachable by admissible runs, sorted
  bool single() const { return labels.size() == 1; }
  int label() const { return labels.at(0); }
};

namespace detail {

// Explores every admissible run of the layered mind-change search from one
// point: enter any component of the current layer containing x; stop at a
// terminating label, else descend into that component's sub-family.
inline void evaluate_impl(const TFamily& f, const IterTree& layer_tree,
                          const FamilyPath& prefix, std::size_t x,
                          std::vector<int>& out) {
  for (const auto& [addr, label] : layer_nodes(layer_tree)) {
    FamilyPath p = prefix;
    p.push_back(addr);
    if (!tilde(f, p).contains(x)) continue;
    if (collapses_to_base(*label))
      out.push_back(collapsed_base_label(*label));
    else
      evaluate_impl(f, *label, p, x, out);
  }
}

}  // namespace detail

/// The mind-change evaluation at a single point. Agrees with determine when
/// that is defined; several labels signal a conflicting family.
inline EvalResult evaluate(const TFamily& f, std::size_t x) {
  EvalResult r;
  detail::evaluate_impl(f, f.shape, {}, x, r.labels);
  std::sort(r.labels.begin(), r.labels.end());
  r.labels.erase(std::unique(r.labels.begin(), r.labels.end()), r.labels.end());
  return r;
}

/// Layer-wise preimage of a family along a continuous map.
inline TFamily pullback(const SpaceMap& f, const TFamily& fam) {
  if (fam.space != f.codomain) throw domain_error("pullback: family not over codomain");
  if (!is_continuous(f)) throw domain_error("pullback requires a continuous map");
  TFamily out;
  out.shape = fam.shape;
  out.space = f.domain;
  for (const auto& [p, s] : fam.sets) out.sets[p] = preimage(f, s);
  return out;
}

inline KPartition compose(const KPartition& a, const SpaceMap& f) {
  if (a.space != f.codomain) throw domain_error("compose: partition not over codomain");
  KPartition r{f.domain, {}, a.k};
  r.values.reserve(f.graph.size());
  for (std::size_t x = 0; x < f.graph.size(); ++x) r.values.push_back(a(f.graph[x]));
  return r;
}

// ---- text format ----
// Header lines `k: <arity>` and `tree: <tree syntax>`, then one
// `path => set` line per family path, where path components are separated by
// `/` and each component is `e` or a dotted child-index address.

namespace detail {

inline NodeAddr parse_addr(const std::string& s) {
  if (s == "e") return {};
  NodeAddr a;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, '.')) {
    if (part.empty()) throw parse_error("family: bad address component: " + s);
    a.push_back(std::stoi(part));
  }
  return a;
}

inline FamilyPath parse_family_path(const std::string& s) {
  FamilyPath p;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, '/')) p.push_back(parse_addr(part));
  return p;
}

}  // namespace detail

inline TFamily parse_family(const std::string& text, const SpaceModel& space) {
  std::istringstream in(text);
  std::string line;
  int k = 2;
  std::optional<IterTree> shape;
  TFamily f;
  f.space = &space;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.rfind("k:", 0) == 0) {
      k = std::stoi(line.substr(2));
      continue;
    }
    if (line.rfind("tree:", 0) == 0) {
      shape = parse_tree(line.substr(5), k);
      continue;
    }
    auto arrow = line.find("=>");
    if (arrow == std::string::npos)
      throw parse_error("family: expected `path => set`: " + line);
    std::string path_text = line.substr(0, arrow);
    path_text.erase(std::remove_if(path_text.begin(), path_text.end(),
                                   [](unsigned char c) { return std::isspace(c); }),
                    path_text.end());
    FamilyPath p = detail::parse_family_path(path_text);
    f.sets[p] = parse_set(line.substr(arrow + 2), space);
  }
  if (!shape) throw parse_error("family: missing `tree:` line");
  f.shape = *shape;
  return f;
}

/// Partition file: optional `k: <arity>` header, then `point value` lines
/// covering every point.
inline KPartition parse_partition(const std::string& text, const SpaceModel& space) {
  std::istringstream in(text);
  std::string line;
  int k = 2;
  std::vector<int> values(space.point_count(), -1);
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.rfind("k:", 0) == 0) {
      k = std::stoi(line.substr(2));
      continue;
    }
    std::istringstream ls(line);
    std::string name;
    int value;
    if (!(ls >> name >> value))
      throw parse_error("partition: expected `point value`: " + line);
    auto idx = space.point_index(name);
    if (!idx) throw parse_error("partition: unknown point " + name);
    values[*idx] = value;
  }
  for (std::size_t p = 0; p < values.size(); ++p) {
    if (values[p] < 0)
      throw parse_error("partition: no value for point " + space.point_name(p));
    if (values[p] >= k)
      throw parse_error("partition: value out of range at " + space.point_name(p));
  }
  return KPartition{&space, std::move(values), k};
}

inline std::string to_string(const KPartition& a) {
  std::string out = "k: " + std::to_string(a.k) + "\n";
  for (std::size_t p = 0; p < a.values.size(); ++p)
    out += a.space->point_name(p) + " " + std::to_string(a.values[p]) + "\n";
  return out;
}

inline std::string to_string(const TFamily& f) {
  std::string out = "k: " + std::to_string(f.shape.arity()) + "\n";
  out += "tree: " + to_string(f.shape) + "\n";
  for (const auto& [p, s] : f.sets)
    out += detail::path_str(p) + " => " + to_string(s) + "\n";
  return out;
}

}  // namespace fh
