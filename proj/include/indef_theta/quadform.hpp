#pragma once

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace indef_theta {

/// Q(v) = v^T A v / 2 for an even symmetric integer matrix A of signature (n-1,1).
class QuadraticForm {
public:
  QuadraticForm() = default;

  std::size_t dim() const { return A_.rows(); }
  const IMatrix &matrix() const { return A_; }
  const RMatrix &matrix_q() const { return Aq_; }
  /// A^{-1}, the coefficient matrix of the Laplacian.
  const RMatrix &inverse() const { return Ainv_; }
  long long det() const { return det_; }
  long long level() const { return level_; }

  friend QuadraticForm make_form(const IMatrix &A);

private:
  IMatrix A_;
  RMatrix Aq_, Ainv_;
  long long det_ = 0;
  long long level_ = 0;
};

inline bool is_even_matrix(const RMatrix &m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j).get_den() != 1) return false;
      if (i == j && m(i, i).get_num() % 2 != 0) return false;
    }
  return true;
}

inline QuadraticForm make_form(const IMatrix &A) {
  if (!A.square() || A.rows() < 2) fail(ErrorCode::DimensionMismatch, "form matrix must be square with n >= 2");
  if (!A.is_symmetric()) fail(ErrorCode::NotSymmetric, "form matrix is not symmetric: " + format_matrix(A));
  for (std::size_t i = 0; i < A.rows(); ++i)
    if (A(i, i) % 2 != 0) fail(ErrorCode::OddDiagonal, "diagonal entry " + std::to_string(i + 1) + " is odd");
  QuadraticForm f;
  f.A_ = A;
  f.Aq_ = A.cast<Rational>();
  Inertia in = inertia(f.Aq_);
  if (in.zero) fail(ErrorCode::Singular, "form matrix is singular");
  if (in.negative != 1)
    fail(ErrorCode::WrongSignature, "signature (" + std::to_string(in.positive) + "," + std::to_string(in.negative) +
                                        "), expected (n-1,1)");
  f.det_ = to_ll(determinant(f.Aq_).get_num());
  f.Ainv_ = *indef_theta::inverse(f.Aq_);
  long long cap = 4 * std::llabs(f.det_);
  for (long long N = 1; N <= cap; ++N) {
    if (is_even_matrix(f.Ainv_ * make_rational(N))) {
      f.level_ = N;
      return f;
    }
  }
  fail(ErrorCode::LevelTooLarge, "level exceeds 4|det A| = " + std::to_string(cap));
}

inline Rational eval_B(const QuadraticForm &form, const RationalVector &u, const RationalVector &v) {
  if (u.size() != form.dim() || v.size() != form.dim()) fail(ErrorCode::DimensionMismatch, "vector length vs form dimension");
  return dot(u, form.matrix_q() * v);
}

inline Rational eval_Q(const QuadraticForm &form, const RationalVector &v) { return eval_B(form, v, v) / 2; }

inline long long eval_B(const QuadraticForm &form, const IntVector &u, const IntVector &v) {
  if (u.size() != form.dim() || v.size() != form.dim()) fail(ErrorCode::DimensionMismatch, "vector length vs form dimension");
  const auto &A = form.matrix();
  long long s = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) s += u[i] * A(i, j) * v[j];
  return s;
}

inline long long eval_Q(const QuadraticForm &form, const IntVector &v) { return eval_B(form, v, v) / 2; }

struct ConeVector {
  RationalVector c;
  Rational normSq;   // Q(c) < 0
  int componentTag;  // sign B(c, c0), always -1 once accepted
};

inline ConeVector make_cone_vector(const QuadraticForm &form, const RationalVector &c, const RationalVector &c0) {
  Rational q = eval_Q(form, c);
  if (q >= 0) fail(ErrorCode::NotNegativeNorm, "Q(c) = " + format_rational_short(q) + " is not negative");
  Rational b = eval_B(form, c, c0);
  if (b > 0) fail(ErrorCode::WrongComponent, "B(c, c0) = " + format_rational_short(b) + " > 0");
  if (b == 0) fail(ErrorCode::WrongComponent, "B(c, c0) = 0; c0 is not a negative vector");
  return ConeVector{c, q, -1};
}

struct AutomorphismCheck {
  bool ok = false;
  std::string reason;
  explicit operator bool() const { return ok; }
};

inline long long int_determinant(const IMatrix &g) { return to_ll(determinant(g.cast<Rational>()).get_num()); }

inline AutomorphismCheck is_automorphism(const QuadraticForm &form, const IMatrix &g, const ConeVector &c) {
  if (!g.square() || g.rows() != form.dim()) return {false, "dimension mismatch"};
  long long det = int_determinant(g);
  if (det != 1 && det != -1) return {false, "det g = " + std::to_string(det) + ", not in GL_n(Z)"};
  if (!(g.transpose() * form.matrix() * g == form.matrix())) return {false, "g^T A g != A"};
  RationalVector gc = g.cast<Rational>() * c.c;
  if (eval_B(form, gc, c.c) >= 0) return {false, "B(gc, c) >= 0 (g swaps the cone components)"};
  return {true, ""};
}

/// Kronecker symbol (a/n) with (a/-1) = sign(a) for a != 0 and (0/-1) = 1.
inline int kronecker(long long a, long long n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int k = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) k = -1;
  }
  int v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  if (v > 0) {
    if (a % 2 == 0) return 0;
    if (v % 2 == 1) {
      long long r = ((a % 8) + 8) % 8;
      if (r == 3 || r == 5) k = -k;
    }
  }
  // n odd positive: Jacobi symbol
  a %= n;
  if (a < 0) a += n;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      long long r = n % 8;
      if (r == 3 || r == 5) k = -k;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) k = -k;
    a %= n;
  }
  return n == 1 ? k : 0;
}

struct Character {
  long long N = 1;
  long long D = 1;
  int parity = 0;  // n mod 2
  long long n = 2;
};

inline Character character_of(const QuadraticForm &form) {
  Character ch;
  ch.N = form.level();
  ch.n = static_cast<long long>(form.dim());
  ch.parity = static_cast<int>(ch.n % 2);
  if (ch.parity == 0) ch.D = ((form.dim() / 2) % 2 ? -1 : 1) * form.det();
  else ch.D = 2 * form.det();
  return ch;
}

/// chi(gamma) = i^k; k is returned mod 4. For n odd, v(gamma) = (c/d) eps_d^{s n}
/// with eps_d in {1, i} and s = epsilonSign (-1 is the principal-branch choice
/// under which the transformation law holds numerically).
inline int chi(const Character &ch, const IMatrix &gamma, int epsilonSign = -1) {
  if (gamma.rows() != 2 || gamma.cols() != 2) fail(ErrorCode::DimensionMismatch, "gamma must be 2x2");
  long long a = gamma(0, 0), b = gamma(0, 1), c = gamma(1, 0), d = gamma(1, 1);
  if (a * d - b * c != 1) fail(ErrorCode::NotInGamma0N, "det gamma != 1");
  if (c % ch.N != 0) fail(ErrorCode::NotInGamma0N, "N = " + std::to_string(ch.N) + " does not divide c = " + std::to_string(c));
  int k = kronecker(ch.D, d) == 1 ? 0 : 2;
  if (kronecker(ch.D, d) == 0) fail(ErrorCode::NotInGamma0N, "gcd(D, d) != 1");
  if (ch.parity == 1) {
    if (d % 2 == 0) fail(ErrorCode::NotInGamma0N, "d even for odd-dimensional form");
    int kc = kronecker(c, d);
    if (kc == 0) fail(ErrorCode::NotInGamma0N, "(c/d) = 0");
    if (kc == -1) k += 2;
    if (((d % 4) + 4) % 4 == 3) k += epsilonSign * static_cast<int>(ch.n % 4);
  }
  return ((k % 4) + 4) % 4;
}

/// Positive definite rational Gram matrix: Q~(v) = v^T G v.
struct PosDefForm {
  RMatrix G;

  Rational eval(const RationalVector &v) const { return dot(v, G * v); }
};

inline PosDefForm certify_posdef(RMatrix G, const std::string &what) {
  if (!is_positive_definite(G)) fail(ErrorCode::ConditionViolated, what + " failed positive-definiteness certification");
  return PosDefForm{std::move(G)};
}

/// Q_c(v) = Q(v) + B(c,v)^2 / (2 (-Q(c))).
inline PosDefForm qc_form(const QuadraticForm &form, const ConeVector &c) {
  RationalVector u = form.matrix_q() * c.c;
  std::size_t n = form.dim();
  RMatrix G = form.matrix_q() * Rational(1, 2);
  Rational s = 1 / (2 * (-c.normSq));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) G(i, j) += s * u[i] * u[j];
  return certify_posdef(std::move(G), "Q_c");
}

inline bool linearly_dependent(const RationalVector &a, const RationalVector &b) {
  RMatrix m(2, a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    m(0, j) = a[j];
    m(1, j) = b[j];
  }
  return rank(m) < 2;
}

/// Q~(v) = Q(v) - B(c1,v) B(c2,v) / B(c1,c2). Positive definite for c1, c2 in
/// the same component, and Q~ <= Q wherever B(c1,v) B(c2,v) <= 0.
inline PosDefForm qplus_form(const QuadraticForm &form, const ConeVector &c1, const ConeVector &c2) {
  if (linearly_dependent(c1.c, c2.c)) fail(ErrorCode::LinearlyDependent, "c1 and c2 are proportional");
  RationalVector u1 = form.matrix_q() * c1.c, u2 = form.matrix_q() * c2.c;
  Rational b12 = dot(c1.c, u2);
  std::size_t n = form.dim();
  RMatrix G = form.matrix_q() * Rational(1, 2);
  Rational s = -1 / (2 * b12);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) G(i, j) += s * (u1[i] * u2[j] + u2[i] * u1[j]);
  return certify_posdef(std::move(G), "Q+ minorant");
}

/// Representatives of A^{-1} Z^n / Z^n with entries in [0,1), sorted.
inline std::vector<RationalVector> dual_classes(const QuadraticForm &form) {
  std::size_t n = form.dim();
  auto reduce = [](RationalVector v) {
    for (auto &x : v) {
      Integer fl;
      mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
      x -= fl;
    }
    return v;
  };
  std::set<RationalVector> seen;
  std::vector<RationalVector> frontier{RationalVector(n, Rational(0))};
  seen.insert(frontier[0]);
  std::vector<RationalVector> gens;
  for (std::size_t j = 0; j < n; ++j) gens.push_back(reduce(form.inverse().col(j)));
  while (!frontier.empty()) {
    std::vector<RationalVector> next;
    for (const auto &v : frontier)
      for (const auto &g : gens) {
        RationalVector w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = v[i] + g[i];
        w = reduce(std::move(w));
        if (seen.insert(w).second) next.push_back(w);
      }
    frontier = std::move(next);
  }
  return {seen.begin(), seen.end()};
}

inline bool in_dual_lattice(const QuadraticForm &form, const RationalVector &lambda) {
  RationalVector w = form.matrix_q() * lambda;
  for (const auto &x : w)
    if (x.get_den() != 1) return false;
  return true;
}

} // namespace indef_theta
