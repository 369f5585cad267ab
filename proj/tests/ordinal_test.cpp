#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "fh/ordinal.hpp"

using fh::Ordinal;

namespace {

// Independent oracle for ordinals below w^w: a word of block exponents,
// w^{e1} + w^{e2} + ..., kept in normal form (each exponent >= all later
// ones). Addition is concatenation; multiplication distributes over blocks.
// This models the ordinal as an explicit well-order: the word is the
// lexicographic product decomposition, and comparison compares order types.
struct Word {
  std::vector<int> blocks;
};

Word normalize(Word w) {
  std::vector<int> out;
  int suffix_max = -1;
  for (auto it = w.blocks.rbegin(); it != w.blocks.rend(); ++it) {
    if (*it >= suffix_max) {
      out.push_back(*it);
      suffix_max = std::max(suffix_max, *it);
    }
  }
  std::reverse(out.begin(), out.end());
  return Word{out};
}

int word_compare(const Word& a, const Word& b) {
  const std::size_t n = std::min(a.blocks.size(), b.blocks.size());
  for (std::size_t i = 0; i < n; ++i)
    if (a.blocks[i] != b.blocks[i]) return a.blocks[i] < b.blocks[i] ? -1 : 1;
  if (a.blocks.size() != b.blocks.size())
    return a.blocks.size() < b.blocks.size() ? -1 : 1;
  return 0;
}

Word word_add(const Word& a, const Word& b) {
  Word r = a;
  r.blocks.insert(r.blocks.end(), b.blocks.begin(), b.blocks.end());
  return normalize(r);
}

Word word_mul(const Word& a, const Word& b) {
  Word r;
  if (a.blocks.empty()) return r;
  for (int f : b.blocks) {
    if (f == 0) {
      // a * 1: one more copy of a on the right.
      r.blocks.insert(r.blocks.end(), a.blocks.begin(), a.blocks.end());
    } else {
      // a * w^f: the copies of a telescope into a single block.
      r.blocks.push_back(a.blocks.front() + f);
    }
  }
  return normalize(r);
}

// Conversion is defined only for ordinals with finite exponents.
Word to_word(const Ordinal& o) {
  Word w;
  for (const auto& t : o.terms()) {
    REQUIRE(t.exponent.is_nat());
    for (std::uint64_t c = 0; c < t.coeff; ++c)
      w.blocks.push_back(static_cast<int>(t.exponent.as_nat()));
  }
  return w;
}

Ordinal from_word(const Word& w) {
  Ordinal r;
  for (int e : w.blocks) r = r + Ordinal::omega_pow(Ordinal::from_nat(e));
  return r;
}

// All ordinals w^2*c2 + w*c1 + c0 with coefficients <= 3.
std::vector<Ordinal> small_domain() {
  std::vector<Ordinal> out;
  for (int c2 = 0; c2 <= 3; ++c2)
    for (int c1 = 0; c1 <= 3; ++c1)
      for (int c0 = 0; c0 <= 3; ++c0)
        out.push_back(Ordinal::omega_pow(Ordinal::from_nat(2)) * Ordinal::from_nat(c2) +
                      Ordinal::omega() * Ordinal::from_nat(c1) + Ordinal::from_nat(c0));
  return out;
}

}  // namespace

TEST_CASE("comparison fixed cases") {
  Ordinal w = Ordinal::omega();
  CHECK(w * Ordinal::from_nat(3) + Ordinal::from_nat(2) < Ordinal::omega_pow(w));
  CHECK(Ordinal::from_nat(0) == Ordinal::from_nat(0));
  // exponent comparison w+1 > w beats any finite coefficient
  CHECK(Ordinal::omega_pow(w) * Ordinal::from_nat(5) <
        Ordinal::omega_pow(w + Ordinal::from_nat(1)));
}

TEST_CASE("addition fixed cases") {
  Ordinal w = Ordinal::omega();
  Ordinal one = Ordinal::from_nat(1);
  CHECK(w + one == fh::parse_ordinal("w + 1"));
  CHECK(one + w == w);
  CHECK((w + one) + (w + one) == fh::parse_ordinal("w*2 + 1"));
}

TEST_CASE("multiplication fixed cases") {
  Ordinal w = Ordinal::omega();
  Ordinal one = Ordinal::from_nat(1);
  CHECK((w + one) * Ordinal::from_nat(2) == fh::parse_ordinal("w*2 + 1"));
  CHECK(w * Ordinal::from_nat(0) == Ordinal::from_nat(0));
  CHECK(Ordinal::from_nat(2) * w == w);
}

TEST_CASE("omega_pow fixed cases") {
  CHECK(Ordinal::omega_pow(Ordinal::from_nat(0)) == Ordinal::from_nat(1));
  CHECK(Ordinal::omega_pow(Ordinal::from_nat(1)) == Ordinal::omega());
  CHECK(Ordinal::omega_pow(Ordinal::omega()) == fh::parse_ordinal("w^w"));
}

TEST_CASE("word oracle agreement below w^3, coefficients <= 3") {
  auto dom = small_domain();
  for (const auto& a : dom) {
    Word wa = to_word(a);
    CHECK(from_word(wa) == a);
    for (const auto& b : dom) {
      Word wb = to_word(b);
      int oc = word_compare(wa, wb);
      auto cc = compare(a, b);
      CHECK((oc < 0) == (cc == std::strong_ordering::less));
      CHECK((oc == 0) == (cc == std::strong_ordering::equal));
      CHECK(a + b == from_word(word_add(wa, wb)));
      CHECK(a * b == from_word(word_mul(wa, wb)));
    }
  }
}

TEST_CASE("omega_pow against the word model on finite exponents") {
  for (int e = 0; e <= 6; ++e) {
    Word w{e == 0 ? std::vector<int>{0} : std::vector<int>{e}};
    CHECK(Ordinal::omega_pow(Ordinal::from_nat(e)) == from_word(w));
  }
}

TEST_CASE("order and algebra laws") {
  auto dom = small_domain();
  for (std::size_t i = 0; i < dom.size(); i += 7)
    for (std::size_t j = 0; j < dom.size(); j += 5)
      for (std::size_t l = 0; l < dom.size(); l += 9) {
        const auto& a = dom[i];
        const auto& b = dom[j];
        const auto& c = dom[l];
        if (b < c) CHECK(a + b < a + c);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
      }
  // omega_pow strictly monotone
  for (std::size_t i = 0; i < dom.size(); ++i)
    for (std::size_t j = i + 1; j < dom.size(); ++j)
      if (dom[i] < dom[j])
        CHECK(Ordinal::omega_pow(dom[i]) < Ordinal::omega_pow(dom[j]));
}

TEST_CASE("text round trip") {
  for (const char* s : {"0", "1", "w", "w + 1", "w*2 + 1", "w^2", "w^w",
                        "w^{w + 1}*2 + w*3 + 1", "w^{w^w}", "w^3*2 + 5"}) {
    Ordinal o = fh::parse_ordinal(s);
    CHECK(fh::to_string(o) == s);
    CHECK(fh::parse_ordinal(fh::to_string(o)) == o);
  }
  CHECK_THROWS_AS(fh::parse_ordinal(""), fh::parse_error);
  CHECK_THROWS_AS(fh::parse_ordinal("w^"), fh::parse_error);
  CHECK_THROWS_AS(fh::parse_ordinal("w*0"), fh::parse_error);
  CHECK_THROWS_AS(fh::parse_ordinal("w + + 1"), fh::parse_error);
}

TEST_CASE("canonicity of arithmetic results") {
  auto dom = small_domain();
  for (const auto& a : dom)
    for (const auto& b : dom) {
      Ordinal s = a + b;
      const auto& ts = s.terms();
      for (std::size_t i = 0; i + 1 < ts.size(); ++i)
        CHECK(ts[i + 1].exponent < ts[i].exponent);
      for (const auto& t : ts) CHECK(t.coeff >= 1);
    }
}
