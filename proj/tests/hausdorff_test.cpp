#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "fh/family.hpp"
#include "fh/hausdorff.hpp"
#include "fh/hierarchy.hpp"
#include "fh/space.hpp"
#include "fh/tree.hpp"

using namespace fh;

namespace {

GuessTable random_table(std::mt19937_64& rng, int k, int b, int d) {
  GuessTable t;
  t.k = k;
  t.b = b;
  t.d = d;
  std::uniform_int_distribution<int> v(0, k - 1);
  std::function<void(std::string&)> walk = [&](std::string& s) {
    if (!s.empty()) t.guess[s] = v(rng);
    if (static_cast<int>(s.size()) == d) return;
    for (int c = 0; c < b; ++c) {
      s.push_back(static_cast<char>('0' + c));
      walk(s);
      s.pop_back();
    }
  };
  std::string s;
  walk(s);
  return t;
}

// Guess changes along the full string w, the first guess counting as a
// change only against nothing (level 0 starts at length 1).
int change_count(const GuessTable& t, const std::string& w) {
  int n = 0;
  for (std::size_t i = 2; i <= w.size(); ++i)
    if (t.at(w.substr(0, i)) != t.at(w.substr(0, i - 1))) ++n;
  return n;
}

bool is_prefix(const std::string& a, const std::string& b) {
  return a.size() <= b.size() && b.compare(0, a.size(), a) == 0;
}

}  // namespace

TEST_CASE("machine view halts exactly on read prefixes") {
  GuessTable t = parse_guess_table("k=2 b=2 d=2\n0 0\n1 1\n00 0\n01 1\n10 1\n11 0\n");
  MindChangeMachine m{&t};
  CHECK(!m.run("01", 0, 0).has_value());
  CHECK(m.run("01", 0, 1) == 0);
  CHECK(m.run("01", 1, 2) == 1);
  CHECK(!m.run("01", 1, 1).has_value());
  CHECK(!m.run("01", 2, 99).has_value());
  CHECK(!m.run("01", -1, 99).has_value());
  CHECK(m.run("10", 1, 5) == 1);
}

TEST_CASE("R-sequence hand traces") {
  SUBCASE("constant guesses never change") {
    GuessTable t = parse_guess_table("k=2 b=2 d=2\n0 1\n1 1\n00 1\n01 1\n10 1\n11 1\n");
    RSequence r = build_r_sequence(t);
    REQUIRE(r.levels.size() == 1);
    CHECK(r.levels[0] == std::vector<std::string>{"0", "1"});
    CHECK(r.value.at("0") == 1);
    CHECK(r.parent.empty());
  }

  SUBCASE("a single change point") {
    GuessTable t = parse_guess_table("k=2 b=2 d=2\n0 0\n1 0\n00 0\n01 1\n10 0\n11 0\n");
    RSequence r = build_r_sequence(t);
    REQUIRE(r.levels.size() == 2);
    CHECK(r.levels[1] == std::vector<std::string>{"01"});
    CHECK(r.value.at("01") == 1);
    CHECK(r.parent.at("01") == "0");
  }
}

TEST_CASE("R-sequence properties on random tables") {
  std::mt19937_64 rng(67);
  for (int rep = 0; rep < 60; ++rep) {
    int k = rep % 2 ? 3 : 2;
    GuessTable t = random_table(rng, k, 2, 5);
    RSequence r = build_r_sequence(t);

    // Levels hold pairwise prefix-incomparable strings.
    for (const auto& lvl : r.levels)
      for (std::size_t i = 0; i < lvl.size(); ++i)
        for (std::size_t j = i + 1; j < lvl.size(); ++j)
          CHECK((!is_prefix(lvl[i], lvl[j]) && !is_prefix(lvl[j], lvl[i])));

    // Parents sit one level up, hold a different value, and nothing changes
    // strictly in between.
    for (std::size_t n = 1; n < r.levels.size(); ++n)
      for (const std::string& tau : r.levels[n]) {
        const std::string& sigma = r.parent.at(tau);
        CHECK(std::count(r.levels[n - 1].begin(), r.levels[n - 1].end(), sigma) == 1);
        CHECK(is_prefix(sigma, tau));
        CHECK(sigma.size() < tau.size());
        CHECK(r.value.at(sigma) != r.value.at(tau));
        CHECK(r.value.at(tau) == t.at(tau));
        for (std::size_t l = sigma.size() + 1; l < tau.size(); ++l)
          CHECK(t.at(tau.substr(0, l)) == r.value.at(sigma));
      }

    // [DERIVED] the deepest R-ancestor of each full string sits at the level
    // given by its mind-change count, and carries its limit value.
    int max_changes = 0;
    for (std::uint64_t w = 0; w < 32; ++w) {
      std::string s;
      for (int i = 4; i >= 0; --i) s += static_cast<char>('0' + ((w >> i) & 1));
      max_changes = std::max(max_changes, change_count(t, s));
      std::size_t best_len = 0;
      int best_level = -1;
      for (std::size_t n = 0; n < r.levels.size(); ++n)
        for (const std::string& m : r.levels[n])
          if (is_prefix(m, s) && m.size() >= best_len) {
            best_len = m.size();
            best_level = static_cast<int>(n);
          }
      REQUIRE(best_level >= 0);
      CHECK(best_level == change_count(t, s));
      CHECK(r.value.at(s.substr(0, best_len)) == t.at(s));
    }
    CHECK(static_cast<int>(r.levels.size()) == max_changes + 1);
  }
}

TEST_CASE("extraction example: tree, family and limit") {
  GuessTable t = parse_guess_table("k=2 b=2 d=2\n0 0\n1 1\n00 0\n01 0\n10 1\n11 0\n");
  HausdorffExtraction ex = hausdorff_extract(t);
  CHECK(to_string(ex.tree) == "node(0; 0, node(1; 0))");
  // Cylinder family over the change points.
  CHECK(validate(ex.family).monotone);
  CHECK(ex.family.sets.at(FamilyPath{NodeAddr{}}).bits == 0b1111);
  CHECK(ex.family.sets.at(FamilyPath{NodeAddr{1, 0}}).bits ==
        ex.space->cylinder_set("11"));
  DetermineResult d = determine(ex.family);
  REQUIRE(d.partition.has_value());
  CHECK(*d.partition == ex.limit());
  CHECK(ex.limit_values == std::vector<int>{0, 0, 1, 0});
  CHECK(verify_membership(ex.family, ex.tree, ex.limit()));
}

TEST_CASE("extraction determines the limit on random tables") {
  std::mt19937_64 rng(71);
  for (int rep = 0; rep < 60; ++rep) {
    int k = rep % 3 ? 2 : 3;
    GuessTable t = random_table(rng, k, 2, rep % 2 ? 4 : 5);
    HausdorffExtraction ex = hausdorff_extract(t);
    CHECK(validate(ex.family).monotone);
    DetermineResult d = determine(ex.family);
    REQUIRE(d.partition.has_value());
    // Independent limit: the table's guess at each full string.
    for (std::size_t p = 0; p < ex.space->point_count(); ++p)
      CHECK((*d.partition)(p) == t.at(ex.space->point_name(p)));
    CHECK(verify_membership(ex.family, ex.tree, ex.limit()));
  }
}

TEST_CASE("changes concentrated on one branch give a deep chain") {
  // Guess = parity of the longest all-1 prefix: five changes along 111111.
  GuessTable t;
  t.k = 2;
  t.b = 2;
  t.d = 6;
  std::function<void(std::string&)> walk = [&](std::string& s) {
    if (!s.empty()) {
      std::size_t ones = 0;
      while (ones < s.size() && s[ones] == '1') ++ones;
      t.guess[s] = static_cast<int>(ones % 2);
    }
    if (static_cast<int>(s.size()) == t.d) return;
    for (int c = 0; c < t.b; ++c) {
      s.push_back(static_cast<char>('0' + c));
      walk(s);
      s.pop_back();
    }
  };
  std::string s;
  walk(s);
  HausdorffExtraction ex = hausdorff_extract(t);
  CHECK(ex.rseq.levels.size() == 6);
  DetermineResult d = determine(ex.family);
  REQUIRE(d.partition.has_value());
  CHECK(*d.partition == ex.limit());
  // The change points along the all-1 branch form a chain in the tree.
  std::string branch = "1";
  for (std::size_t n = 1; n < ex.rseq.levels.size(); ++n) {
    bool found = false;
    for (const std::string& m : ex.rseq.levels[n])
      if (is_prefix("1", m) && m.find('0') == std::string::npos) found = true;
    CHECK(found);
  }
}

TEST_CASE("guess table text format and validation") {
  GuessTable t = parse_guess_table("k=3 b=2 d=2\n0 2\n1 1\n00 0\n01 1\n10 2\n11 0\n");
  CHECK(parse_guess_table(to_string(t)).guess == t.guess);
  CHECK_THROWS_AS(parse_guess_table("0 0\n"), parse_error);
  CHECK_THROWS_AS(parse_guess_table("k=2 b=2 d=1\n0 0\n"), domain_error);  // missing 1
  CHECK_THROWS_AS(parse_guess_table("k=2 b=2 d=1\n0 0\n1 5\n"), domain_error);
  CHECK_THROWS_AS(parse_guess_table("k=2 b=2 d=1\n0 0\n1 0\n1 1\n"), parse_error);
  CHECK_THROWS_AS(parse_guess_table("k=2 b=2 d=1\n0 0\n1 0\n22 1\n"), domain_error);
  CHECK_THROWS_AS(parse_guess_table("k=1 b=2 d=1\n0 0\n1 0\n"), domain_error);
}
