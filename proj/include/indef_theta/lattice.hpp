#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "quadform.hpp"

namespace indef_theta {

inline constexpr double kDefaultPointCap = 1e8;

struct EnumRequest {
  PosDefForm posdef;
  RationalVector shift;  // lambda
  Rational bound;        // M
};

/// Completed-square coefficients: x^T G x = sum_i d_i (x_i + sum_{j>i} r_ij x_j)^2.
template <class T> struct SquareCompletion {
  std::vector<T> d;
  Matrix<T> r;
};

inline SquareCompletion<Rational> complete_squares(const RMatrix &G) {
  std::size_t n = G.rows();
  RMatrix q = G;
  for (std::size_t i = 0; i < n; ++i) {
    if (q(i, i) <= 0) fail(ErrorCode::ConditionViolated, "square completion of a non positive definite form");
    for (std::size_t j = i + 1; j < n; ++j) {
      q(j, i) = q(i, j);
      q(i, j) /= q(i, i);
    }
    for (std::size_t k = i + 1; k < n; ++k)
      for (std::size_t l = k; l < n; ++l) q(k, l) -= q(k, i) * q(i, l);
  }
  SquareCompletion<Rational> sc{RationalVector(n), RMatrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    sc.d[i] = q(i, i);
    for (std::size_t j = i + 1; j < n; ++j) sc.r(i, j) = q(i, j);
  }
  return sc;
}

inline SquareCompletion<double> to_double(const SquareCompletion<Rational> &sc) {
  std::size_t n = sc.d.size();
  SquareCompletion<double> out{std::vector<double>(n), Matrix<double>(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.d[i] = sc.d[i].get_d();
    for (std::size_t j = i + 1; j < n; ++j) out.r(i, j) = sc.r(i, j).get_d();
  }
  return out;
}

/// Volume of {x : x^T G x <= M}, used as a point-count estimate.
inline double ellipsoid_volume(const SquareCompletion<double> &sc, double M) {
  double n = static_cast<double>(sc.d.size());
  double vol = std::pow(std::numbers::pi, n / 2) / std::tgamma(n / 2 + 1) * std::pow(std::max(M, 0.0), n / 2);
  for (double di : sc.d) vol /= std::sqrt(di);
  return vol;
}

namespace detail {

struct ExactEnumerator {
  const SquareCompletion<Rational> &sc;
  const SquareCompletion<double> &scd;
  const RationalVector &lambda;
  const std::function<void(const IntVector &)> &visit;
  double cap;
  std::size_t n;
  IntVector k;
  RationalVector ell;
  std::size_t visited = 0;

  bool fits(std::size_t i, long long ki, const Rational &center, const Rational &budget, Rational &rest) const {
    Rational t = lambda[i] + make_rational(ki) - center;
    rest = budget - sc.d[i] * t * t;
    return rest >= 0;
  }

  void run(std::size_t i, const Rational &budget) {
    Rational center = 0;
    for (std::size_t j = i + 1; j < n; ++j)
      if (sc.r(i, j) != 0) center -= sc.r(i, j) * ell[j];
    double half = std::sqrt(std::max(0.0, budget.get_d() / scd.d[i]));
    double base = center.get_d() - lambda[i].get_d();
    if (!std::isfinite(half) || std::fabs(base) + half > 9e15) fail(ErrorCode::BoundTooLarge, "coordinate range overflows");
    long long lo = static_cast<long long>(std::ceil(base - half));
    long long hi = static_cast<long long>(std::floor(base + half));
    Rational rest;
    while (fits(i, lo - 1, center, budget, rest)) --lo;
    while (lo <= hi && !fits(i, lo, center, budget, rest)) ++lo;
    while (fits(i, hi + 1, center, budget, rest)) ++hi;
    while (hi >= lo && !fits(i, hi, center, budget, rest)) --hi;
    for (long long ki = lo; ki <= hi; ++ki) {
      k[i] = ki;
      ell[i] = lambda[i] + make_rational(ki);
      if (i == 0) {
        if (static_cast<double>(++visited) > cap) fail(ErrorCode::BoundTooLarge, "point count exceeds cap");
        visit(k);
        continue;
      }
      fits(i, ki, center, budget, rest);
      run(i - 1, rest);
    }
  }
};

} // namespace detail

/// Visits every k in Z^n with Q~(lambda + k) <= M exactly (interval endpoints are
/// settled in rational arithmetic). Order: last coordinate outermost.
inline void enumerate_visit(const EnumRequest &req, const std::function<void(const IntVector &)> &visit,
                            double cap = kDefaultPointCap) {
  std::size_t n = req.posdef.G.rows();
  if (req.shift.size() != n) fail(ErrorCode::DimensionMismatch, "shift length vs form dimension");
  if (req.bound < 0) return;
  auto sc = complete_squares(req.posdef.G);
  auto scd = to_double(sc);
  if (ellipsoid_volume(scd, req.bound.get_d()) > cap)
    fail(ErrorCode::BoundTooLarge, "estimated point count exceeds cap");
  detail::ExactEnumerator e{sc, scd, req.shift, visit, cap, n, IntVector(n, 0), RationalVector(n), 0};
  e.run(n - 1, req.bound);
}

/// All points lambda + k with Q~ <= M, ordered by Q~ then lexicographically.
inline std::vector<RationalVector> enumerate(const EnumRequest &req, double cap = kDefaultPointCap) {
  std::vector<std::pair<Rational, RationalVector>> pts;
  enumerate_visit(
      req,
      [&](const IntVector &k) {
        RationalVector ell(k.size());
        for (std::size_t i = 0; i < k.size(); ++i) ell[i] = req.shift[i] + make_rational(k[i]);
        Rational q = req.posdef.eval(ell);
        pts.emplace_back(std::move(q), std::move(ell));
      },
      cap);
  std::sort(pts.begin(), pts.end());
  std::vector<RationalVector> out;
  out.reserve(pts.size());
  for (auto &p : pts) out.push_back(std::move(p.second));
  return out;
}

/// Floating-point variant for numeric sums: visits k with Q~(lambda + k) <= M up to
/// rounding (boundary points may be included or skipped).
inline void enumerate_visit_float(const SquareCompletion<double> &sc, const std::vector<double> &lambda, double M,
                                  const std::function<void(const IntVector &)> &visit, double cap = kDefaultPointCap) {
  std::size_t n = sc.d.size();
  if (ellipsoid_volume(sc, M) > cap) fail(ErrorCode::BoundTooLarge, "estimated point count exceeds cap");
  IntVector k(n, 0);
  std::vector<double> ell(n);
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double budget) {
    double center = 0;
    for (std::size_t j = i + 1; j < n; ++j) center -= sc.r(i, j) * ell[j];
    double half = std::sqrt(std::max(0.0, budget / sc.d[i]));
    long long lo = static_cast<long long>(std::ceil(center - lambda[i] - half));
    long long hi = static_cast<long long>(std::floor(center - lambda[i] + half));
    for (long long ki = lo; ki <= hi; ++ki) {
      k[i] = ki;
      ell[i] = lambda[i] + static_cast<double>(ki);
      double t = ell[i] - center;
      double rest = budget - sc.d[i] * t * t;
      if (i == 0) visit(k);
      else rec(i - 1, std::max(rest, 0.0));
    }
  };
  rec(n - 1, M);
}

struct SupportTerm {
  RationalVector point;
  int signFactor;
  Rational qValue;
};

inline int sign_factor(const Rational &b1, const Rational &b2) { return sign(b1) - sign(b2); }

/// Every lambda + k with nonzero sign factor and Q <= M, ordered by Q then lexicographically.
inline std::vector<SupportTerm> support_terms(const QuadraticForm &form, const ConeVector &c1, const ConeVector &c2,
                                              const RationalVector &lambda, const Rational &maxQ,
                                              double cap = kDefaultPointCap) {
  if (linearly_dependent(c1.c, c2.c)) return {};
  EnumRequest req{qplus_form(form, c1, c2), lambda, maxQ};
  RationalVector u1 = form.matrix_q() * c1.c, u2 = form.matrix_q() * c2.c;
  std::vector<SupportTerm> out;
  enumerate_visit(
      req,
      [&](const IntVector &k) {
        RationalVector ell(k.size());
        for (std::size_t i = 0; i < k.size(); ++i) ell[i] = lambda[i] + make_rational(k[i]);
        int s = sign_factor(dot(u1, ell), dot(u2, ell));
        if (s == 0) return;
        Rational q = eval_Q(form, ell);
        if (q > maxQ) return;
        out.push_back(SupportTerm{std::move(ell), s, std::move(q)});
      },
      cap);
  std::sort(out.begin(), out.end(), [](const SupportTerm &a, const SupportTerm &b) {
    if (a.qValue != b.qValue) return a.qValue < b.qValue;
    return a.point < b.point;
  });
  return out;
}

} // namespace indef_theta
