#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fh/error.hpp"

namespace fh {

struct OrdTerm;

/// Ordinal below epsilon_0 in Cantor normal form:
///   w^{e_1}*c_1 + w^{e_2}*c_2 + ... with e_1 > e_2 > ... and c_i >= 1.
/// The empty term list is 0. Exponents are themselves Ordinals, so the
/// representation is a finite tree and canonical per value.
class Ordinal {
 public:
  using Term = OrdTerm;

  Ordinal() = default;

  static Ordinal from_nat(std::uint64_t n);
  static Ordinal omega();
  /// w^a, a single CNF term with coefficient 1.
  static Ordinal omega_pow(const Ordinal& a);

  const std::vector<OrdTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_nat() const;
  std::uint64_t as_nat() const;

  friend std::strong_ordering compare(const Ordinal& a, const Ordinal& b);
  friend Ordinal operator+(const Ordinal& a, const Ordinal& b);
  friend Ordinal operator*(const Ordinal& a, const Ordinal& b);

 private:
  std::vector<OrdTerm> terms_;
};

struct OrdTerm {
  Ordinal exponent;
  std::uint64_t coeff;  // >= 1
};

inline Ordinal Ordinal::from_nat(std::uint64_t n) {
  Ordinal o;
  if (n > 0) o.terms_.push_back({Ordinal(), n});
  return o;
}

inline Ordinal Ordinal::omega_pow(const Ordinal& a) {
  Ordinal o;
  o.terms_.push_back({a, 1});
  return o;
}

inline Ordinal Ordinal::omega() { return omega_pow(from_nat(1)); }

inline bool Ordinal::is_nat() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.is_zero());
}

inline std::uint64_t Ordinal::as_nat() const {
  if (!is_nat()) throw domain_error("ordinal is not a natural number");
  return terms_.empty() ? 0 : terms_[0].coeff;
}

inline std::strong_ordering compare(const Ordinal& a, const Ordinal& b) {
  const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto ce = compare(a.terms_[i].exponent, b.terms_[i].exponent);
    if (ce != std::strong_ordering::equal) return ce;
    if (a.terms_[i].coeff != b.terms_[i].coeff)
      return a.terms_[i].coeff <=> b.terms_[i].coeff;
  }
  return a.terms_.size() <=> b.terms_.size();
}

inline bool operator==(const Ordinal& a, const Ordinal& b) {
  return compare(a, b) == std::strong_ordering::equal;
}
inline bool operator!=(const Ordinal& a, const Ordinal& b) { return !(a == b); }
inline bool operator<(const Ordinal& a, const Ordinal& b) {
  return compare(a, b) == std::strong_ordering::less;
}
inline bool operator<=(const Ordinal& a, const Ordinal& b) {
  return compare(a, b) != std::strong_ordering::greater;
}

/// Ordinal addition: terms of a strictly below the leading exponent of b
/// are absorbed.
inline Ordinal operator+(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  Ordinal r;
  const Ordinal& lead = b.terms_[0].exponent;
  std::size_t i = 0;
  while (i < a.terms_.size() &&
         compare(a.terms_[i].exponent, lead) == std::strong_ordering::greater) {
    r.terms_.push_back(a.terms_[i]);
    ++i;
  }
  r.terms_.push_back(b.terms_[0]);
  if (i < a.terms_.size() && a.terms_[i].exponent == lead)
    r.terms_.back().coeff += a.terms_[i].coeff;
  r.terms_.insert(r.terms_.end(), b.terms_.begin() + 1, b.terms_.end());
  return r;
}

/// Ordinal multiplication, left-distributed over b's CNF terms.
inline Ordinal operator*(const Ordinal& a, const Ordinal& b) {
  if (a.is_zero() || b.is_zero()) return Ordinal();
  Ordinal r;
  for (const OrdTerm& t : b.terms_) {
    Ordinal part;
    if (t.exponent.is_zero()) {
      // a * n: only the leading coefficient is multiplied.
      part = a;
      part.terms_[0].coeff *= t.coeff;
    } else {
      part.terms_.push_back({a.terms_[0].exponent + t.exponent, t.coeff});
    }
    r = r + part;
  }
  return r;
}

namespace detail {

inline void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

inline Ordinal parse_ordinal_expr(const std::string& s, std::size_t& i);

// term := nat | 'w' [ '^' (simple-exp | '{' expr '}') ] [ '*' nat ]
inline Ordinal parse_ordinal_term(const std::string& s, std::size_t& i) {
  skip_ws(s, i);
  if (i >= s.size()) throw parse_error("ordinal: unexpected end of input");
  if (std::isdigit(static_cast<unsigned char>(s[i]))) {
    std::uint64_t n = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
      n = n * 10 + static_cast<std::uint64_t>(s[i++] - '0');
    return Ordinal::from_nat(n);
  }
  if (s[i] != 'w') throw parse_error("ordinal: expected 'w' or digit at position " +
                                     std::to_string(i));
  ++i;
  Ordinal exp = Ordinal::from_nat(1);
  skip_ws(s, i);
  if (i < s.size() && s[i] == '^') {
    ++i;
    skip_ws(s, i);
    if (i < s.size() && s[i] == '{') {
      ++i;
      exp = parse_ordinal_expr(s, i);
      skip_ws(s, i);
      if (i >= s.size() || s[i] != '}') throw parse_error("ordinal: missing '}'");
      ++i;
    } else if (i < s.size() && s[i] == 'w') {
      // Unbraced exponent is atomic: w^w or w^3. Anything larger needs braces.
      ++i;
      exp = Ordinal::omega();
    } else if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      std::uint64_t n = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
        n = n * 10 + static_cast<std::uint64_t>(s[i++] - '0');
      exp = Ordinal::from_nat(n);
    } else {
      throw parse_error("ordinal: expected exponent after '^'");
    }
  }
  std::uint64_t coeff = 1;
  skip_ws(s, i);
  if (i < s.size() && s[i] == '*') {
    ++i;
    skip_ws(s, i);
    if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
      throw parse_error("ordinal: expected coefficient after '*'");
    coeff = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
      coeff = coeff * 10 + static_cast<std::uint64_t>(s[i++] - '0');
    if (coeff == 0) throw parse_error("ordinal: zero coefficient");
  }
  return Ordinal::omega_pow(exp) * Ordinal::from_nat(coeff);
}

inline Ordinal parse_ordinal_expr(const std::string& s, std::size_t& i) {
  Ordinal r = parse_ordinal_term(s, i);
  skip_ws(s, i);
  while (i < s.size() && s[i] == '+') {
    ++i;
    r = r + parse_ordinal_term(s, i);
    skip_ws(s, i);
  }
  return r;
}

}  // namespace detail

/// Parses the textual syntax `w^{<ordinal>}*<nat> + ...`, e.g. `w^w*2 + w*3 + 1`.
inline Ordinal parse_ordinal(const std::string& s) {
  std::size_t i = 0;
  detail::skip_ws(s, i);
  if (i >= s.size()) throw parse_error("ordinal: empty input");
  Ordinal r = detail::parse_ordinal_expr(s, i);
  detail::skip_ws(s, i);
  if (i != s.size())
    throw parse_error("ordinal: trailing input at position " + std::to_string(i));
  return r;
}

inline std::string to_string(const Ordinal& o) {
  if (o.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : o.terms()) {
    if (!first) out += " + ";
    first = false;
    if (t.exponent.is_zero()) {
      out += std::to_string(t.coeff);
      continue;
    }
    if (t.exponent == Ordinal::from_nat(1)) {
      out += "w";
    } else if (t.exponent.is_nat() || t.exponent == Ordinal::omega()) {
      out += "w^" + to_string(t.exponent);
    } else {
      out += "w^{" + to_string(t.exponent) + "}";
    }
    if (t.coeff != 1) out += "*" + std::to_string(t.coeff);
  }
  return out;
}

}  // namespace fh
