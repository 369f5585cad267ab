#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fh/error.hpp"

namespace fh {

/// Finite T0 Alexandrov space given as a poset; open sets are the up-sets.
struct Poset {
  std::vector<std::string> names;
  // leq[i] bit j set iff element i <= element j (reflexive transitive order).
  std::vector<std::uint64_t> leq;
};

/// Depth-truncated cylinder space: points are the b^d strings of length d.
/// Every set is a union of depth-d cylinders, so the point topology is
/// discrete; the interest of the model is its string structure (prefix maps,
/// cylinder generators), not its separation behavior.
struct Cylinder {
  int alphabet;  // b >= 2
  int depth;     // d >= 1
};

class SpaceModel {
 public:
  static SpaceModel poset(std::vector<std::string> names,
                          const std::vector<std::pair<int, int>>& strict_pairs) {
    const std::size_t n = names.size();
    if (n == 0 || n > 64) throw domain_error("poset size must be in 1..64");
    Poset p;
    p.names = std::move(names);
    p.leq.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) p.leq[i] |= bit(i);
    for (auto [a, b] : strict_pairs) {
      if (a < 0 || b < 0 || a >= static_cast<int>(n) || b >= static_cast<int>(n))
        throw domain_error("poset: order pair out of range");
      p.leq[a] |= bit(b);
    }
    // Transitive closure, then antisymmetry check.
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (p.leq[i] & bit(k)) p.leq[i] |= p.leq[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && (p.leq[i] & bit(j)) && (p.leq[j] & bit(i)))
          throw domain_error("poset: order is not antisymmetric (" + p.names[i] +
                             " vs " + p.names[j] + ")");
    SpaceModel m;
    m.v_ = std::move(p);
    return m;
  }

  static SpaceModel cylinder(int alphabet, int depth) {
    if (alphabet < 2 || depth < 1) throw domain_error("cylinder: need b >= 2, d >= 1");
    std::uint64_t count = 1;
    for (int i = 0; i < depth; ++i) {
      count *= static_cast<std::uint64_t>(alphabet);
      if (count > 64) throw domain_error("cylinder: b^d exceeds 64 points");
    }
    SpaceModel m;
    m.v_ = Cylinder{alphabet, depth};
    return m;
  }

  bool is_poset() const { return std::holds_alternative<Poset>(v_); }
  bool is_cylinder() const { return std::holds_alternative<Cylinder>(v_); }
  const Poset& as_poset() const { return std::get<Poset>(v_); }
  const Cylinder& as_cylinder() const { return std::get<Cylinder>(v_); }

  std::size_t point_count() const {
    if (is_poset()) return as_poset().names.size();
    const auto& c = as_cylinder();
    std::size_t n = 1;
    for (int i = 0; i < c.depth; ++i) n *= static_cast<std::size_t>(c.alphabet);
    return n;
  }

  std::uint64_t all_points() const {
    std::size_t n = point_count();
    return n == 64 ? ~0ull : (1ull << n) - 1;
  }

  std::string point_name(std::size_t p) const {
    if (is_poset()) return as_poset().names.at(p);
    const auto& c = as_cylinder();
    std::string s(static_cast<std::size_t>(c.depth), '0');
    for (int i = c.depth - 1; i >= 0; --i) {
      s[static_cast<std::size_t>(i)] =
          static_cast<char>('0' + static_cast<int>(p % static_cast<std::size_t>(c.alphabet)));
      p /= static_cast<std::size_t>(c.alphabet);
    }
    return s;
  }

  std::optional<std::size_t> point_index(const std::string& name) const {
    if (is_poset()) {
      const auto& ns = as_poset().names;
      for (std::size_t i = 0; i < ns.size(); ++i)
        if (ns[i] == name) return i;
      return std::nullopt;
    }
    const auto& c = as_cylinder();
    if (static_cast<int>(name.size()) != c.depth) return std::nullopt;
    std::size_t p = 0;
    for (char ch : name) {
      int digit = ch - '0';
      if (digit < 0 || digit >= c.alphabet) return std::nullopt;
      p = p * static_cast<std::size_t>(c.alphabet) + static_cast<std::size_t>(digit);
    }
    return p;
  }

  /// Cylinder [sigma] restricted to depth-d points, as a bit mask.
  std::uint64_t cylinder_set(const std::string& prefix) const {
    const auto& c = as_cylinder();
    if (static_cast<int>(prefix.size()) > c.depth)
      throw domain_error("cylinder generator longer than depth");
    std::uint64_t r = 0;
    for (std::size_t p = 0; p < point_count(); ++p)
      if (point_name(p).compare(0, prefix.size(), prefix) == 0) r |= bit(p);
    return r;
  }

  static std::uint64_t bit(std::size_t i) { return 1ull << i; }

  bool operator==(const SpaceModel& o) const {
    if (is_poset() != o.is_poset()) return false;
    if (is_poset())
      return as_poset().names == o.as_poset().names && as_poset().leq == o.as_poset().leq;
    return as_cylinder().alphabet == o.as_cylinder().alphabet &&
           as_cylinder().depth == o.as_cylinder().depth;
  }

 private:
  SpaceModel() = default;
  std::variant<Poset, Cylinder> v_;
};

/// A subset of a space's points. The mask is the source of truth; cylinder
/// generator strings are derived on demand for printing.
struct SetRep {
  const SpaceModel* space = nullptr;
  std::uint64_t bits = 0;

  bool contains(std::size_t p) const { return bits & SpaceModel::bit(p); }
  bool subset_of(const SetRep& o) const { return (bits & ~o.bits) == 0; }
  bool empty() const { return bits == 0; }
};

inline SetRep make_set(const SpaceModel& space, std::uint64_t bits) {
  return SetRep{&space, bits & space.all_points()};
}

inline SetRep whole_space(const SpaceModel& space) {
  return make_set(space, space.all_points());
}

// ---- topology ----

/// Up-closure (smallest open superset, poset) of the mask.
inline std::uint64_t up_closure(const Poset& p, std::uint64_t s) {
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < p.names.size(); ++i)
    if (s & SpaceModel::bit(i)) r |= p.leq[i];
  return r;
}

inline bool is_open(const SetRep& s) {
  if (s.space->is_cylinder()) return true;  // discrete at depth d
  return up_closure(s.space->as_poset(), s.bits) == s.bits;
}

inline SetRep interior(const SetRep& s) {
  if (s.space->is_cylinder()) return s;
  const Poset& p = s.space->as_poset();
  std::uint64_t r = 0;
  for (std::size_t i = 0; i < p.names.size(); ++i)
    if ((s.bits & SpaceModel::bit(i)) && (p.leq[i] & ~s.bits) == 0) r |= SpaceModel::bit(i);
  return make_set(*s.space, r);
}

inline SetRep closure(const SetRep& s) {
  if (s.space->is_cylinder()) return s;
  const Poset& p = s.space->as_poset();
  std::uint64_t r = s.bits;
  for (std::size_t i = 0; i < p.names.size(); ++i)
    if (p.leq[i] & s.bits) r |= SpaceModel::bit(i);  // i below some member
  return make_set(*s.space, r);
}

/// All open sets of the space, in increasing mask order (deterministic).
inline std::vector<std::uint64_t> enumerate_opens(const SpaceModel& space) {
  std::vector<std::uint64_t> out;
  const std::size_t n = space.point_count();
  if (n > 20) throw budget_exceeded("enumerate_opens: more than 2^20 subsets");
  const std::uint64_t all = space.all_points();
  for (std::uint64_t m = 0;; ++m) {
    if (is_open(SetRep{&space, m})) out.push_back(m);
    if (m == all) break;
  }
  return out;
}

// ---- levels of the effective Borel base, desk scale ----
// Level 0 is the open sets; every further level is all sets (a finite model
// collapses the hierarchy at level 1: every set is a Boolean combination of
// opens).

inline bool level_member(const SetRep& s, int n) {
  if (n < 0) throw domain_error("level index must be >= 0");
  return n >= 1 || is_open(s);
}

// ---- maps ----

struct SpaceMap {
  const SpaceModel* domain = nullptr;
  const SpaceModel* codomain = nullptr;
  std::vector<std::size_t> graph;  // graph[x] = f(x), total

  std::size_t operator()(std::size_t x) const { return graph.at(x); }
};

namespace detail {

inline std::size_t common_prefix_len(const std::string& a, const std::string& b) {
  std::size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  return i;
}

}  // namespace detail

/// Builds a map and validates totality. Cylinder-to-cylinder maps must be
/// induced by length-preserving prefix-respecting string maps: points sharing
/// a prefix of length l must map to points sharing a prefix of length l.
inline SpaceMap make_map(const SpaceModel& dom, const SpaceModel& cod,
                         std::vector<std::size_t> graph) {
  if (graph.size() != dom.point_count()) throw domain_error("map is not total");
  for (std::size_t y : graph)
    if (y >= cod.point_count()) throw domain_error("map value out of range");
  if (dom.is_cylinder() != cod.is_cylinder())
    throw domain_error("maps must stay within one model variant");
  if (dom.is_cylinder()) {
    if (dom.as_cylinder().depth != cod.as_cylinder().depth)
      throw domain_error("cylinder maps must preserve depth");
    for (std::size_t x = 0; x < graph.size(); ++x)
      for (std::size_t y = x + 1; y < graph.size(); ++y) {
        std::size_t l = detail::common_prefix_len(dom.point_name(x), dom.point_name(y));
        if (detail::common_prefix_len(cod.point_name(graph[x]), cod.point_name(graph[y])) < l)
          throw domain_error("cylinder map is not induced by a prefix map");
      }
  }
  return SpaceMap{&dom, &cod, std::move(graph)};
}

inline SetRep image(const SpaceMap& f, const SetRep& s) {
  std::uint64_t r = 0;
  for (std::size_t x = 0; x < f.graph.size(); ++x)
    if (s.contains(x)) r |= SpaceModel::bit(f.graph[x]);
  return make_set(*f.codomain, r);
}

inline SetRep preimage(const SpaceMap& f, const SetRep& s) {
  std::uint64_t r = 0;
  for (std::size_t x = 0; x < f.graph.size(); ++x)
    if (s.contains(f.graph[x])) r |= SpaceModel::bit(x);
  return make_set(*f.domain, r);
}

inline bool is_continuous(const SpaceMap& f) {
  if (f.domain->is_cylinder()) return true;  // prefix maps, discrete points
  const Poset& d = f.domain->as_poset();
  const Poset& c = f.codomain->as_poset();
  for (std::size_t x = 0; x < d.names.size(); ++x)
    for (std::size_t y = 0; y < d.names.size(); ++y)
      if ((d.leq[x] & SpaceModel::bit(y)) &&
          !(c.leq[f.graph[x]] & SpaceModel::bit(f.graph[y])))
        return false;
  return true;
}

/// Open map check. For posets it suffices that images of principal up-sets
/// are up-sets: every up-set is a union of principal ones and images commute
/// with unions.
inline bool is_open_map(const SpaceMap& f) {
  if (f.domain->is_cylinder()) return true;
  const Poset& d = f.domain->as_poset();
  for (std::size_t x = 0; x < d.names.size(); ++x) {
    SetRep principal = make_set(*f.domain, d.leq[x]);
    if (!is_open(image(f, principal))) return false;
  }
  return true;
}

inline bool is_surjection(const SpaceMap& f) {
  return image(f, whole_space(*f.domain)).bits == f.codomain->all_points();
}

// ---- base handles: m-shift and U-restriction ----

/// Handle onto (a shift/restriction of) the space's level structure. Level n
/// of the handle is level n+shift of the underlying base, intersected with
/// the restriction window when present.
struct BaseHandle {
  const SpaceModel* space = nullptr;
  int shift = 0;
  std::optional<SetRep> window;  // open restriction set

  std::uint64_t window_bits() const {
    return window ? window->bits : space->all_points();
  }

  bool level_member(const SetRep& s, int n) const {
    if ((s.bits & ~window_bits()) != 0) return false;
    return fh::level_member(s, n + shift);
  }

  /// All level-n sets of the handle, ascending mask order.
  std::vector<std::uint64_t> enumerate_level(int n) const {
    std::vector<std::uint64_t> out;
    const std::uint64_t w = window_bits();
    if (n + shift >= 1 || space->is_cylinder()) {
      int bits_in_w = __builtin_popcountll(w);
      if (bits_in_w > 20) throw budget_exceeded("enumerate_level: window too large");
      // All subsets of the window.
      std::uint64_t sub = 0;
      while (true) {
        out.push_back(sub);
        if (sub == w) break;
        sub = (sub - w) & w;  // next subset of w
      }
      std::sort(out.begin(), out.end());
      return out;
    }
    for (std::uint64_t m : enumerate_opens(*space))
      if ((m & ~w) == 0) out.push_back(m);
    return out;
  }
};

inline BaseHandle shift_base(const SpaceModel& space, int m) {
  if (m < 0) throw domain_error("shift must be >= 0");
  return BaseHandle{&space, m, std::nullopt};
}

inline BaseHandle restrict_base(const SpaceModel& space, const SetRep& u) {
  if (!is_open(u)) throw domain_error("restriction window must be open");
  return BaseHandle{&space, 0, u};
}

// ---- reduction ----

namespace detail {

// First-index-wins difference rule; valid whenever the level contains all
// differences involved (every level >= 1, and every cylinder level).
inline std::vector<std::uint64_t> difference_reduct(const std::vector<SetRep>& cs) {
  std::vector<std::uint64_t> r(cs.size());
  std::uint64_t seen = 0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    r[i] = cs[i].bits & ~seen;
    seen |= cs[i].bits;
  }
  return r;
}

}  // namespace detail

/// Replaces C_0, ..., C_m by pairwise disjoint level-n sets R_i <= C_i with
/// the same union. Deterministic: the first valid assignment in canonical
/// order (points ascending, indices ascending) wins. Throws no_reduction when
/// the level genuinely lacks the property for these sets (possible only for
/// poset level 0).
inline std::vector<SetRep> reduce_sequence(const std::vector<SetRep>& cs, int n,
                                           const BaseHandle& base) {
  if (cs.empty()) return {};
  const SpaceModel& space = *base.space;
  for (const auto& c : cs) {
    if (c.space != &space) throw domain_error("reduce_sequence: space mismatch");
    if (!base.level_member(c, n))
      throw domain_error("reduce_sequence: input not in level " + std::to_string(n));
  }
  auto finish = [&](const std::vector<std::uint64_t>& masks) {
    std::vector<SetRep> out;
    out.reserve(masks.size());
    for (std::uint64_t m : masks) out.push_back(make_set(space, m));
    return out;
  };

  std::vector<std::uint64_t> diff = detail::difference_reduct(cs);
  bool diff_ok = true;
  for (std::uint64_t m : diff)
    if (!base.level_member(make_set(space, m), n)) diff_ok = false;
  if (diff_ok) return finish(diff);

  // Poset level 0: search assignments point -> owning index; each class must
  // come out open. Canonical backtracking keeps the result deterministic.
  std::uint64_t uni = 0;
  for (const auto& c : cs) uni |= c.bits;
  std::vector<std::size_t> points;
  for (std::size_t p = 0; p < space.point_count(); ++p)
    if (uni & SpaceModel::bit(p)) points.push_back(p);

  std::vector<std::uint64_t> acc(cs.size(), 0);
  const Poset& po = space.as_poset();
  auto open_within = [&](std::uint64_t s, std::uint64_t assigned) {
    // s can still grow with unassigned points; only already-assigned points
    // can wreck up-closure. Check: every assigned point above a member of s
    // that is not in s rules the branch out.
    std::uint64_t needed = up_closure(po, s) & assigned & ~s;
    return needed == 0;
  };
  auto search = [&](auto&& self, std::size_t pi, std::uint64_t assigned) -> bool {
    if (pi == points.size()) {
      for (std::uint64_t m : acc)
        if (!is_open(make_set(space, m))) return false;
      return true;
    }
    std::size_t p = points[pi];
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (!cs[i].contains(p)) continue;
      acc[i] |= SpaceModel::bit(p);
      bool feasible = true;
      for (std::uint64_t m : acc)
        if (!open_within(m, assigned | SpaceModel::bit(p))) feasible = false;
      if (feasible && self(self, pi + 1, assigned | SpaceModel::bit(p))) return true;
      acc[i] &= ~SpaceModel::bit(p);
    }
    return false;
  };
  if (search(search, 0, 0)) return finish(acc);

  // No reduct exists. Witness: the first point forced into overlapping sets.
  std::size_t witness = points.empty() ? 0 : points[0];
  for (std::size_t p : points) {
    int owners = 0;
    for (const auto& c : cs)
      if (c.contains(p)) ++owners;
    if (owners > 1) {
      witness = p;
      break;
    }
  }
  throw no_reduction("level " + std::to_string(n) +
                         " lacks the reduction property for these sets (point " +
                         space.point_name(witness) + ")",
                     witness);
}

inline std::pair<SetRep, SetRep> reduce_pair(const SetRep& c0, const SetRep& c1, int n) {
  BaseHandle base = shift_base(*c0.space, 0);
  auto r = reduce_sequence({c0, c1}, n, base);
  return {r[0], r[1]};
}

// ---- text formats ----
// Poset file:     `elements: a b c` and `order: a<b b<c` lines.
// Cylinder file:  `cylinder: <b> <d>`.
// Map file:       `a->x` lines.
// Cylinder sets:  one generator string per line.

inline SpaceModel parse_space(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> elements;
  std::vector<std::pair<std::string, std::string>> pairs;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "cylinder:") {
      int b = 0, d = 0;
      if (!(ls >> b >> d)) throw parse_error("space: cylinder line needs `b d`");
      return SpaceModel::cylinder(b, d);
    }
    if (head == "elements:") {
      std::string tok;
      while (ls >> tok) elements.push_back(tok);
    } else if (head == "order:") {
      std::string tok;
      while (ls >> tok) {
        auto lt = tok.find('<');
        if (lt == std::string::npos || lt == 0 || lt + 1 >= tok.size())
          throw parse_error("space: order token must look like a<b: " + tok);
        pairs.emplace_back(tok.substr(0, lt), tok.substr(lt + 1));
      }
    } else {
      throw parse_error("space: unknown line head: " + head);
    }
  }
  if (elements.empty()) throw parse_error("space: no elements");
  std::vector<std::pair<int, int>> idx_pairs;
  auto find = [&](const std::string& n) {
    for (std::size_t i = 0; i < elements.size(); ++i)
      if (elements[i] == n) return static_cast<int>(i);
    throw parse_error("space: unknown element in order: " + n);
  };
  for (auto& [a, b] : pairs) idx_pairs.emplace_back(find(a), find(b));
  return SpaceModel::poset(elements, idx_pairs);
}

inline std::string to_string(const SpaceModel& space) {
  if (space.is_cylinder()) {
    const auto& c = space.as_cylinder();
    return "cylinder: " + std::to_string(c.alphabet) + " " + std::to_string(c.depth) + "\n";
  }
  const Poset& p = space.as_poset();
  std::string out = "elements:";
  for (const auto& n : p.names) out += " " + n;
  out += "\norder:";
  // Covering pairs only; parsing recomputes the transitive closure.
  for (std::size_t i = 0; i < p.names.size(); ++i)
    for (std::size_t j = 0; j < p.names.size(); ++j) {
      if (i == j || !(p.leq[i] & SpaceModel::bit(j))) continue;
      bool covering = true;
      for (std::size_t m = 0; m < p.names.size(); ++m)
        if (m != i && m != j && (p.leq[i] & SpaceModel::bit(m)) &&
            (p.leq[m] & SpaceModel::bit(j)))
          covering = false;
      if (covering) out += " " + p.names[i] + "<" + p.names[j];
    }
  out += "\n";
  return out;
}

/// Prefix-minimal generator strings of a cylinder set (greedy: emit sigma
/// whenever [sigma] fits inside the remainder).
inline std::vector<std::string> cylinder_generators(const SetRep& s) {
  const auto& c = s.space->as_cylinder();
  std::vector<std::string> out;
  std::uint64_t rest = s.bits;
  auto visit = [&](auto&& self, const std::string& prefix) -> void {
    if (rest == 0) return;
    std::uint64_t cyl = s.space->cylinder_set(prefix);
    if ((cyl & ~s.bits) == 0) {
      if (cyl & rest) {
        out.push_back(prefix);
        rest &= ~cyl;
      }
      return;
    }
    if (static_cast<int>(prefix.size()) == c.depth) return;
    for (int a = 0; a < c.alphabet; ++a)
      self(self, prefix + static_cast<char>('0' + a));
  };
  visit(visit, "");
  return out;
}

/// Set syntax: for posets a whitespace-separated element list, for cylinders
/// a whitespace-separated generator list. Empty text is the empty set.
inline SetRep parse_set(const std::string& text, const SpaceModel& space) {
  std::istringstream in(text);
  std::string tok;
  std::uint64_t bits = 0;
  while (in >> tok) {
    if (space.is_cylinder()) {
      bits |= space.cylinder_set(tok == "e" ? "" : tok);
    } else {
      auto idx = space.point_index(tok);
      if (!idx) throw parse_error("set: unknown element: " + tok);
      bits |= SpaceModel::bit(*idx);
    }
  }
  return make_set(space, bits);
}

inline std::string to_string(const SetRep& s) {
  std::string out;
  if (s.space->is_cylinder()) {
    for (const auto& g : cylinder_generators(s)) {
      if (!out.empty()) out += " ";
      out += g.empty() ? "e" : g;
    }
  } else {
    for (std::size_t p = 0; p < s.space->point_count(); ++p)
      if (s.contains(p)) {
        if (!out.empty()) out += " ";
        out += s.space->point_name(p);
      }
  }
  return out;
}

inline SpaceMap parse_map(const std::string& text, const SpaceModel& dom,
                          const SpaceModel& cod) {
  std::istringstream in(text);
  std::string tok;
  std::vector<std::size_t> graph(dom.point_count(), dom.point_count());
  while (in >> tok) {
    auto arrow = tok.find("->");
    if (arrow == std::string::npos)
      throw parse_error("map: token must look like a->x: " + tok);
    auto x = dom.point_index(tok.substr(0, arrow));
    auto y = cod.point_index(tok.substr(arrow + 2));
    if (!x || !y) throw parse_error("map: unknown point in " + tok);
    graph[*x] = *y;
  }
  for (std::size_t x = 0; x < graph.size(); ++x)
    if (graph[x] == dom.point_count())
      throw parse_error("map: no value for point " + dom.point_name(x));
  return make_map(dom, cod, std::move(graph));
}

inline std::string to_string(const SpaceMap& f) {
  std::string out;
  for (std::size_t x = 0; x < f.graph.size(); ++x) {
    if (!out.empty()) out += " ";
    out += f.domain->point_name(x) + "->" + f.codomain->point_name(f.graph[x]);
  }
  return out;
}

}  // namespace fh
