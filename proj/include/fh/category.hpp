#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fh/error.hpp"
#include "fh/family.hpp"
#include "fh/hierarchy.hpp"
#include "fh/space.hpp"
#include "fh/tree.hpp"

namespace fh {

/// Relative topology on a subset of a poset model. Category notions on the
/// string model are degenerate (it is discrete), so this module rejects it.
struct SubspaceView {
  const SpaceModel* space = nullptr;
  std::uint64_t window = 0;
};

inline SubspaceView subspace(const SpaceModel& space, std::uint64_t window) {
  if (!space.is_poset()) throw domain_error("category notions need a poset model");
  if (window & ~space.all_points()) throw domain_error("window outside the space");
  return SubspaceView{&space, window};
}

inline SubspaceView subspace(const SetRep& s) { return subspace(*s.space, s.bits); }

/// Closure within the subspace: down-closure clipped to the window.
inline std::uint64_t rel_closure(const SubspaceView& v, std::uint64_t s) {
  const Poset& p = v.space->as_poset();
  std::uint64_t r = 0;
  for (std::size_t x = 0; x < p.names.size(); ++x)
    if ((v.window >> x) & 1 && (p.leq[x] & s & v.window)) r |= SpaceModel::bit(x);
  return r;
}

/// Interior within the subspace: points whose minimal neighbourhood trace
/// stays inside the set.
inline std::uint64_t rel_interior(const SubspaceView& v, std::uint64_t s) {
  const Poset& p = v.space->as_poset();
  std::uint64_t r = 0;
  for (std::size_t x = 0; x < p.names.size(); ++x)
    if ((s >> x) & 1 && ((p.leq[x] & v.window) & ~s) == 0) r |= SpaceModel::bit(x);
  return r & v.window;
}

inline bool is_nowhere_dense(const SubspaceView& v, std::uint64_t s) {
  return rel_interior(v, rel_closure(v, s & v.window)) == 0;
}

/// On a finite space a set is meager iff each of its singletons is nowhere
/// dense; finite unions of nowhere dense sets are exactly these.
inline bool is_meager(const SubspaceView& v, std::uint64_t s) {
  for (std::size_t x = 0; x < v.space->point_count(); ++x)
    if (s & v.window & SpaceModel::bit(x))
      if (!is_nowhere_dense(v, SpaceModel::bit(x))) return false;
  return true;
}

/// No nonempty open subset of the window is meager in the window.
inline bool is_baire(const SubspaceView& v) {
  for (std::uint64_t m : enumerate_opens(*v.space)) {
    std::uint64_t u = m & v.window;
    // Need relative opens; traces of opens are exactly those.
    if (u != 0 && is_meager(SubspaceView{v.space, u}, u)) return false;
  }
  return true;
}

inline bool is_baire(const SpaceModel& space) {
  return is_baire(subspace(space, space.all_points()));
}

/// The category pushforward f[S]: points of the codomain over whose fiber S
/// is non-meager. Between sections of the preimage and image of S when f is
/// open continuous and the fibers are Baire.
inline SetRep category_image(const SpaceMap& f, const SetRep& s) {
  if (s.space != f.domain) throw domain_error("category_image: set not over the domain");
  if (!f.domain->is_poset() || !f.codomain->is_poset())
    throw domain_error("category notions need poset models");
  std::uint64_t r = 0;
  for (std::size_t y = 0; y < f.codomain->point_count(); ++y) {
    std::uint64_t fiber = 0;
    for (std::size_t x = 0; x < f.graph.size(); ++x)
      if (f.graph[x] == y) fiber |= SpaceModel::bit(x);
    if (fiber && !is_meager(subspace(*f.domain, fiber), s.bits & fiber))
      r |= SpaceModel::bit(y);
  }
  return make_set(*f.codomain, r);
}

/// Layer-wise pushforward of a family along an open continuous surjection.
/// Each component of the image family sits inside the image of the matching
/// component, which is asserted per path.
inline TFamily pushforward(const SpaceMap& f, const TFamily& fam) {
  if (fam.space != f.domain) throw domain_error("pushforward: family not over the domain");
  if (!is_continuous(f) || !is_open_map(f) || !is_surjection(f))
    throw domain_error("pushforward requires an open continuous surjection");
  TFamily out;
  out.shape = fam.shape;
  out.space = f.codomain;
  for (const auto& [p, s] : fam.sets) out.sets[p] = category_image(f, s);
  for (const auto& [p, s] : fam.sets) {
    SetRep ct = category_image(f, tilde(fam, p));
    if (!tilde(out, p).subset_of(ct))
      throw domain_error("pushforward: image component escaped the component image");
  }
  return out;
}

/// Transfer of hierarchy positions along a quotient: A sits at the position
/// of `shape` over the codomain iff its pullback does over the domain. Both
/// sides are searched exhaustively; `agrees` is meaningful only when neither
/// side ran out of budget.
struct PreservationReport {
  bool applicable = false;  // open continuous surjection between Baire posets
  std::string reason;
  MembershipResult codomain_side{MembershipResult::Status::unknown, std::nullopt, 0};
  MembershipResult domain_side{MembershipResult::Status::unknown, std::nullopt, 0};
  bool decided = false;
  bool agrees = false;
};

inline PreservationReport check_preservation(const SpaceMap& f, const KPartition& a,
                                             const IterTree& shape,
                                             const Budget& budget = {}) {
  PreservationReport rep;
  if (a.space != f.codomain) throw domain_error("partition must live on the codomain");
  if (!f.domain->is_poset() || !f.codomain->is_poset())
    rep.reason = "category transfer needs poset models";
  else if (!is_continuous(f))
    rep.reason = "map is not continuous";
  else if (!is_open_map(f))
    rep.reason = "map is not open";
  else if (!is_surjection(f))
    rep.reason = "map is not surjective";
  else if (!is_baire(*f.domain) || !is_baire(*f.codomain))
    rep.reason = "a side fails the Baire property";
  else
    rep.applicable = true;
  rep.codomain_side = search_witness(a, shape, budget);
  rep.domain_side = search_witness(compose(a, f), shape, budget);
  const auto unknown = MembershipResult::Status::unknown;
  if (rep.codomain_side.status != unknown && rep.domain_side.status != unknown) {
    rep.decided = true;
    rep.agrees = rep.codomain_side.is_member() == rep.domain_side.is_member();
  }
  return rep;
}

}  // namespace fh
