#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <random>
#include <vector>

#include "fh/category.hpp"
#include "fh/family.hpp"
#include "fh/hierarchy.hpp"
#include "fh/space.hpp"
#include "fh/tree.hpp"
#include "util.hpp"

using namespace fh;

namespace {

// Relative opens of a window are exactly the traces of opens.
std::vector<std::uint64_t> rel_opens(const SpaceModel& sp, std::uint64_t w) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t m : enumerate_opens(sp)) out.push_back(m & w);
  return out;
}

// Smallest relatively closed superset of s inside w.
std::uint64_t oracle_rel_closure(const SpaceModel& sp, std::uint64_t w, std::uint64_t s) {
  std::uint64_t r = w;
  for (std::uint64_t u : rel_opens(sp, w)) {
    std::uint64_t closed = w & ~u;
    if ((s & w & ~closed) == 0) r &= closed;
  }
  return r;
}

std::uint64_t oracle_rel_interior(const SpaceModel& sp, std::uint64_t w, std::uint64_t s) {
  std::uint64_t r = 0;
  for (std::uint64_t u : rel_opens(sp, w))
    if ((u & ~s) == 0) r |= u;
  return r;
}

bool oracle_nwd(const SpaceModel& sp, std::uint64_t w, std::uint64_t s) {
  return oracle_rel_interior(sp, w, oracle_rel_closure(sp, w, s & w)) == 0;
}

// Meager = union of finitely many nowhere dense sets; equivalently contained
// in the union of all nowhere dense subsets of the window.
bool oracle_meager(const SpaceModel& sp, std::uint64_t w, std::uint64_t s) {
  std::uint64_t all_nwd = 0;
  for (std::uint64_t sub = 0;; sub = (sub - w) & w) {
    if (oracle_nwd(sp, w, sub)) all_nwd |= sub;
    if (sub == w) break;
  }
  return ((s & w) & ~all_nwd) == 0;
}

}  // namespace

TEST_CASE("relative closure and interior match the brute-force topology") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 40; ++rep) {
    SpaceModel sp = testutil::random_poset(rng, 4);
    std::uniform_int_distribution<std::uint64_t> bits(0, sp.all_points());
    for (int i = 0; i < 10; ++i) {
      std::uint64_t w = bits(rng);
      std::uint64_t s = bits(rng) & w;
      SubspaceView v = subspace(sp, w);
      CHECK(rel_closure(v, s) == oracle_rel_closure(sp, w, s));
      CHECK(rel_interior(v, s) == oracle_rel_interior(sp, w, s));
      CHECK(is_nowhere_dense(v, s) == oracle_nwd(sp, w, s));
      CHECK(is_meager(v, s) == oracle_meager(sp, w, s));
    }
  }
  SpaceModel cyl = SpaceModel::cylinder(2, 2);
  CHECK_THROWS_AS(subspace(cyl, 0b1), domain_error);
  SpaceModel sp = testutil::sierpinski();
  CHECK_THROWS_AS(subspace(sp, 0b100), domain_error);
}

TEST_CASE("meager sets on the two-point space") {
  SpaceModel sp = testutil::sierpinski();
  SubspaceView v = subspace(sp, 0b11);
  // The closed point is isolated from no open set: nowhere dense.
  CHECK(is_nowhere_dense(v, 0b01));
  CHECK(is_meager(v, 0b01));
  // The open point is its own minimal neighbourhood.
  CHECK(!is_nowhere_dense(v, 0b10));
  CHECK(!is_meager(v, 0b10));
  CHECK(is_meager(v, 0));
  CHECK(!is_meager(v, 0b11));
}

TEST_CASE("every finite poset and subspace is Baire") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 30; ++rep) {
    SpaceModel sp = testutil::random_poset(rng, 5);
    CHECK(is_baire(sp));
    std::uniform_int_distribution<std::uint64_t> bits(0, sp.all_points());
    CHECK(is_baire(subspace(sp, bits(rng))));
  }
}

TEST_CASE("category_image: examples and fiber oracle") {
  SpaceModel sp = testutil::sierpinski();
  SpaceModel pt = SpaceModel::poset({"p"}, {});

  SUBCASE("identity acts as the identity") {
    SpaceMap id = make_map(sp, sp, {0, 1});
    for (std::uint64_t s = 0; s < 4; ++s)
      CHECK(category_image(id, make_set(sp, s)).bits == s);
  }

  SUBCASE("collapse to a point keeps only non-meager sets") {
    SpaceMap c = make_map(sp, pt, {0, 0});
    CHECK(category_image(c, make_set(sp, 0b01)).bits == 0);  // meager fiber trace
    CHECK(category_image(c, make_set(sp, 0b10)).bits == 1);
    CHECK(category_image(c, make_set(sp, 0b11)).bits == 1);
    CHECK(category_image(c, make_set(sp, 0)).bits == 0);
  }

  SUBCASE("fiber-wise oracle and inclusion in the direct image") {
    std::mt19937_64 rng(37);
    int open_checked = 0;
    for (int rep = 0; rep < 200; ++rep) {
      SpaceModel dom = testutil::random_poset(rng, 4);
      SpaceModel cod = testutil::random_poset(rng, 3);
      std::uniform_int_distribution<std::size_t> pt3(0, 2);
      std::vector<std::size_t> graph{pt3(rng), pt3(rng), pt3(rng), pt3(rng)};
      SpaceMap f = make_map(dom, cod, graph);
      std::uniform_int_distribution<std::uint64_t> bits(0, dom.all_points());
      for (int i = 0; i < 8; ++i) {
        SetRep s = make_set(dom, bits(rng));
        SetRep ci = category_image(f, s);
        for (std::size_t y = 0; y < 3; ++y) {
          std::uint64_t fiber = 0;
          for (std::size_t x = 0; x < 4; ++x)
            if (graph[x] == y) fiber |= SpaceModel::bit(x);
          bool expect = fiber && !oracle_meager(dom, fiber, s.bits & fiber);
          CHECK(ci.contains(y) == expect);
        }
        CHECK(ci.subset_of(image(f, s)));
        // Open continuous maps send open sets to open category images.
        if (is_continuous(f) && is_open_map(f) && is_open(s)) {
          CHECK(is_open(ci));
          ++open_checked;
        }
      }
    }
    CHECK(open_checked > 30);
  }
}

TEST_CASE("pushforward of families") {
  SpaceModel sp = testutil::sierpinski();
  SpaceModel three = SpaceModel::poset({"x", "y", "z"}, {{0, 1}, {1, 2}});
  // x -> bot, y -> top, z -> top is an open continuous surjection.
  SpaceMap q = make_map(three, sp, {0, 1, 1});
  REQUIRE(is_continuous(q));
  REQUIRE(is_open_map(q));
  REQUIRE(is_surjection(q));

  SUBCASE("identity pushforward is the identity") {
    std::mt19937_64 rng(41);
    SpaceMap id = make_map(sp, sp, {0, 1});
    for (int rep = 0; rep < 20; ++rep) {
      TFamily f = testutil::random_family(rng, sp, chain_tree({0, 1, 0}, 2));
      TFamily g = pushforward(id, f);
      for (const auto& [p, s] : g.sets) CHECK(s.bits == f.sets.at(p).bits);
    }
  }

  SUBCASE("pushforward inverts pullback along a quotient") {
    std::mt19937_64 rng(43);
    auto shapes = enumerate_trees(2, 1, 3);
    for (int rep = 0; rep < 40; ++rep) {
      TFamily g = testutil::random_family(rng, sp, shapes[rep % shapes.size()]);
      TFamily up = pullback(q, g);
      TFamily down = pushforward(q, up);
      for (const auto& [p, s] : down.sets) CHECK(s.bits == g.sets.at(p).bits);
    }
  }

  SUBCASE("maps without the quotient properties are rejected") {
    std::mt19937_64 rng(1);
    TFamily f = testutil::random_family(rng, three, chain_tree({0, 1}, 2));
    SpaceMap not_surj = make_map(three, sp, {1, 1, 1});
    CHECK_THROWS_AS(pushforward(not_surj, f), domain_error);
    // z -> bot, x -> bot, y -> top is monotone nowhere: not continuous.
    SpaceMap not_cont = make_map(three, sp, {1, 0, 1});
    CHECK_THROWS_AS(pushforward(not_cont, f), domain_error);
  }
}

TEST_CASE("position transfer along quotients") {
  SpaceModel sp = testutil::sierpinski();
  SpaceModel three = SpaceModel::poset({"x", "y", "z"}, {{0, 1}, {1, 2}});
  SpaceMap q = make_map(three, sp, {0, 1, 1});

  SUBCASE("applicability reasons") {
    KPartition a{&sp, {0, 1}, 2};
    CHECK(check_preservation(q, a, chain_tree({0, 1}, 2)).applicable);
    SpaceMap not_surj = make_map(three, sp, {1, 1, 1});
    PreservationReport r = check_preservation(not_surj, a, chain_tree({0, 1}, 2));
    CHECK(!r.applicable);
    CHECK(!r.reason.empty());
    CHECK_THROWS_AS(check_preservation(q, KPartition{&three, {0, 1, 1}, 2},
                                       chain_tree({0, 1}, 2)),
                    domain_error);
  }

  SUBCASE("membership agrees on both sides for every partition and shape") {
    auto shapes = enumerate_trees(2, 1, 3);
    for (int mask = 0; mask < 4; ++mask) {
      KPartition a{&sp, {mask & 1, (mask >> 1) & 1}, 2};
      for (const auto& t : shapes) {
        PreservationReport r = check_preservation(q, a, t);
        REQUIRE(r.applicable);
        REQUIRE(r.decided);
        CHECK(r.agrees);
      }
    }
  }
}
