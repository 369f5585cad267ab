#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fh/category.hpp"
#include "fh/family.hpp"
#include "fh/hausdorff.hpp"
#include "fh/hierarchy.hpp"
#include "fh/ordinal.hpp"
#include "fh/space.hpp"
#include "fh/tree.hpp"

namespace fh {

struct SelftestResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

namespace detail {

inline Ordinal random_ordinal(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> nterms(0, 2);
  std::uniform_int_distribution<std::uint64_t> coeff(1, 3);
  Ordinal r;
  int n = nterms(rng) + (depth == 0 ? 1 : 0);
  for (int i = 0; i < n; ++i) {
    Ordinal e = depth > 0 ? random_ordinal(rng, depth - 1) : Ordinal::from_nat(coeff(rng) - 1);
    r = r + Ordinal::omega_pow(e) * Ordinal::from_nat(coeff(rng));
  }
  return r;
}

inline TFamily random_chain_family(std::mt19937_64& rng, const SpaceModel& space,
                                   int len) {
  std::vector<int> labels;
  for (int i = 0; i < len; ++i) labels.push_back(i % 2);
  TFamily f;
  f.shape = chain_tree(labels, 2);
  f.space = &space;
  auto opens = enumerate_opens(space);
  std::uniform_int_distribution<std::size_t> pick(0, opens.size() - 1);
  std::uint64_t prev = space.all_points();
  NodeAddr addr;
  for (int i = 0; i < len; ++i) {
    std::uint64_t s = i == 0 ? prev : (opens[pick(rng)] & prev);
    f.sets[FamilyPath{addr}] = make_set(space, s);
    prev = s;
    addr.push_back(0);
  }
  return f;
}

}  // namespace detail

/// Fast cross-module invariant checks, deterministic per seed. Returns one
/// line per suite; a failed suite carries the first offending instance.
inline std::vector<SelftestResult> run_selftests(std::uint64_t seed) {
  std::vector<SelftestResult> out;
  std::mt19937_64 rng(seed);

  {
    SelftestResult r{"ordinal-algebra", true, ""};
    for (int it = 0; it < 50 && r.ok; ++it) {
      Ordinal a = detail::random_ordinal(rng, 2);
      Ordinal b = detail::random_ordinal(rng, 2);
      Ordinal c = detail::random_ordinal(rng, 2);
      if ((a + b) + c != a + (b + c)) {
        r.ok = false;
        r.detail = "addition not associative at " + to_string(a);
      }
      if ((a * b) * c != a * (b * c)) {
        r.ok = false;
        r.detail = "multiplication not associative at " + to_string(a);
      }
      if (a * (b + c) != a * b + a * c) {
        r.ok = false;
        r.detail = "left distributivity failed at " + to_string(a);
      }
      if (parse_ordinal(to_string(a)) != a) {
        r.ok = false;
        r.detail = "round trip failed at " + to_string(a);
      }
    }
    out.push_back(r);
  }

  {
    SelftestResult r{"h-preorder", true, ""};
    auto trees = enumerate_trees(2, 1, 4);
    for (const auto& t : trees)
      if (r.ok && !h_leq(t, t).holds) {
        r.ok = false;
        r.detail = "not reflexive at " + to_string(t);
      }
    std::uniform_int_distribution<std::size_t> pick(0, trees.size() - 1);
    for (int it = 0; it < 200 && r.ok; ++it) {
      const auto& a = trees[pick(rng)];
      const auto& b = trees[pick(rng)];
      const auto& c = trees[pick(rng)];
      if (h_leq(a, b).holds && h_leq(b, c).holds && !h_leq(a, c).holds) {
        r.ok = false;
        r.detail = "not transitive at " + to_string(a) + " / " + to_string(b);
      }
      if (!h_leq(a, s_embed(a)).holds) {
        r.ok = false;
        r.detail = "singleton embedding not monotone at " + to_string(a);
      }
      if (!h_equiv(dual(dual(a)), a)) {
        r.ok = false;
        r.detail = "dual not involutive at " + to_string(a);
      }
    }
    out.push_back(r);
  }

  {
    SelftestResult r{"family-reduction", true, ""};
    SpaceModel sp = SpaceModel::poset({"a", "b", "c", "d"}, {{0, 1}, {0, 2}, {1, 3}});
    for (int it = 0; it < 40 && r.ok; ++it) {
      TFamily f = detail::random_chain_family(rng, sp, 3);
      TFamily g = reduce_family(f);
      if (!is_reduced(g)) {
        r.ok = false;
        r.detail = "output not reduced:\n" + to_string(f);
        break;
      }
      DetermineResult df = determine(f);
      DetermineResult dg = determine(g);
      if (df && (!dg || !(*df.partition == *dg.partition))) {
        r.ok = false;
        r.detail = "determined partition changed:\n" + to_string(f);
      }
    }
    out.push_back(r);
  }

  {
    SelftestResult r{"evaluation-agrees", true, ""};
    SpaceModel sp = SpaceModel::poset({"a", "b", "c"}, {{0, 1}, {0, 2}});
    for (int it = 0; it < 40 && r.ok; ++it) {
      TFamily f = detail::random_chain_family(rng, sp, 3);
      DetermineResult d = determine(f);
      if (!d) continue;
      for (std::size_t x = 0; x < sp.point_count(); ++x) {
        EvalResult e = evaluate(f, x);
        if (!e.single() || e.label() != (*d.partition)(x)) {
          r.ok = false;
          r.detail = "pointwise run disagrees at " + sp.point_name(x);
        }
      }
    }
    out.push_back(r);
  }

  {
    SelftestResult r{"category-image", true, ""};
    SpaceModel dom = SpaceModel::poset({"p", "q", "r", "s"}, {{0, 2}, {1, 3}});
    SpaceModel cod = SpaceModel::poset({"x", "y"}, {{0, 1}});
    SpaceMap f = make_map(dom, cod, {0, 0, 1, 1});
    std::uniform_int_distribution<std::uint64_t> bits(0, dom.all_points());
    for (int it = 0; it < 60 && r.ok; ++it) {
      SetRep s = make_set(dom, bits(rng));
      SetRep ci = category_image(f, s);
      if (!ci.subset_of(image(f, s))) {
        r.ok = false;
        r.detail = "pushforward escaped the direct image";
      }
      if (is_meager(subspace(dom, dom.all_points()), s.bits) &&
          !is_meager(subspace(cod, cod.all_points()), ci.bits)) {
        r.ok = false;
        r.detail = "meager set with non-meager pushforward";
      }
    }
    out.push_back(r);
  }

  {
    SelftestResult r{"mind-change-extraction", true, ""};
    std::uniform_int_distribution<int> bit(0, 1);
    for (int it = 0; it < 20 && r.ok; ++it) {
      GuessTable t;
      t.k = 2;
      t.b = 2;
      t.d = 3;
      for (int len = 1; len <= t.d; ++len)
        for (int v = 0; v < (1 << len); ++v) {
          std::string s;
          for (int i = len - 1; i >= 0; --i) s += static_cast<char>('0' + ((v >> i) & 1));
          t.guess[s] = bit(rng);
        }
      HausdorffExtraction ex = hausdorff_extract(t);
      ValidationReport rep = validate(ex.family);
      if (!rep.monotone) {
        r.ok = false;
        r.detail = "extracted family invalid: " + rep.problems.front();
        break;
      }
      DetermineResult d = determine(ex.family);
      if (!d || !(*d.partition == ex.limit())) {
        r.ok = false;
        r.detail = "extracted family does not determine the limit:\n" + to_string(t);
      }
    }
    out.push_back(r);
  }

  return out;
}

}  // namespace fh
