#pragma once

#include <string>

#include "rational.hpp"

namespace indef_theta {

struct PellSolution {
  long long D = 0;
  Integer x, y;
  bool fundamental = true;     // false after the odd-x doubling step
  bool parityAdjusted = false;
};

inline bool is_perfect_square(long long D) {
  if (D < 0) return false;
  Integer z(static_cast<long>(D));
  return mpz_perfect_square_p(z.get_mpz_t()) != 0;
}

/// Fundamental solution of x^2 - D y^2 = 1 from the continued fraction of sqrt(D).
/// With requireOddX, an even x is replaced by (x^2 + D y^2, 2 x y).
inline PellSolution pell_solve(long long D, bool requireOddX = false) {
  if (D < 2) fail(ErrorCode::NegativeArgument, "Pell equation needs D >= 2");
  if (is_perfect_square(D)) fail(ErrorCode::PerfectSquare, std::to_string(D) + " is a perfect square");
  Integer d(static_cast<long>(D));
  Integer a0;
  mpz_sqrt(a0.get_mpz_t(), d.get_mpz_t());
  // convergents p/q of [a0; a1, a2, ...]
  Integer m = 0, den = 1, a = a0;
  Integer pPrev = 1, p = a0, qPrev = 0, q = 1;
  while (p * p - d * q * q != 1) {
    m = den * a - m;
    den = (d - m * m) / den;
    a = (a0 + m) / den;
    Integer pn = a * p + pPrev, qn = a * q + qPrev;
    pPrev = p;
    qPrev = q;
    p = pn;
    q = qn;
  }
  PellSolution s{D, p, q, true, false};
  if (requireOddX && mpz_even_p(s.x.get_mpz_t())) {
    Integer x2 = s.x * s.x + d * s.y * s.y, y2 = 2 * s.x * s.y;
    s.x = x2;
    s.y = y2;
    s.fundamental = false;
    s.parityAdjusted = true;
  }
  return s;
}

} // namespace indef_theta
