#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace indef_theta {

using Rational = mpq_class;
using Integer = mpz_class;
using RationalVector = std::vector<Rational>;
using IntVector = std::vector<long long>;

inline Rational make_rational(long long num, long long den = 1) {
  Rational r(Integer(static_cast<long>(num)), Integer(static_cast<long>(den)));
  r.canonicalize();
  return r;
}

inline int sign(const Rational &r) { return sgn(r); }

inline int sign(long long v) { return (v > 0) - (v < 0); }

/// Parses "p", "-p", "p/q" (whitespace ignored).
inline Rational parse_rational(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) fail(ErrorCode::ParseError, "empty rational");
  auto valid_int = [](std::string_view t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i >= t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
    fail(ErrorCode::ParseError, "malformed rational '" + std::string(text) + "'");
  if (num[0] == '+') num.erase(0, 1);
  Integer n(num), d(den);
  if (d == 0) fail(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

/// Canonical "a/b" rendering (denominator always printed).
inline std::string format_rational(const Rational &r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

/// Short rendering: "a" for integers, "a/b" otherwise.
inline std::string format_rational_short(const Rational &r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return format_rational(r);
}

inline Integer lcm_of_denominators(const RationalVector &v) {
  Integer l = 1;
  for (const auto &x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den().get_mpz_t());
  return l;
}

inline long long to_ll(const Integer &z) {
  if (!z.fits_slong_p()) fail(ErrorCode::Overflow, "integer does not fit in 64 bits: " + z.get_str());
  return z.get_si();
}

inline Rational dot(const RationalVector &a, const RationalVector &b) {
  if (a.size() != b.size()) fail(ErrorCode::DimensionMismatch, "dot product of unequal lengths");
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline RationalVector to_rational(const IntVector &v) {
  RationalVector r;
  r.reserve(v.size());
  for (auto x : v) r.emplace_back(make_rational(x));
  return r;
}

inline std::string format_vector(const RationalVector &v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_rational_short(v[i]);
  }
  return s + ")";
}

} // namespace indef_theta
