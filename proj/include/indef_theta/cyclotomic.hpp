#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace indef_theta {

/// Coefficients of the L-th cyclotomic polynomial, constant term first.
inline const std::vector<long long> &cyclotomic_polynomial(long long L) {
  static std::recursive_mutex mu;
  static std::map<long long, std::vector<long long>> cache;
  std::lock_guard<std::recursive_mutex> lock(mu);
  if (L < 1) fail(ErrorCode::RingMismatch, "cyclotomic order must be positive");
  if (auto it = cache.find(L); it != cache.end()) return it->second;
  // x^L - 1 divided by Phi_d for every proper divisor d
  std::vector<long long> num(L + 1, 0);
  num[0] = -1;
  num[L] = 1;
  for (long long d = 1; d < L; ++d) {
    if (L % d) continue;
    std::vector<long long> den = cyclotomic_polynomial(d);
    std::vector<long long> q(num.size() - den.size() + 1, 0);
    for (long long i = static_cast<long long>(q.size()) - 1; i >= 0; --i) {
      long long c = num[i + den.size() - 1];  // den is monic
      q[i] = c;
      for (std::size_t j = 0; j < den.size(); ++j) num[i + j] -= c * den[j];
    }
    num = q;
  }
  return cache[L] = num;
}

inline long long euler_phi(long long L) { return static_cast<long long>(cyclotomic_polynomial(L).size()) - 1; }

/// Element of Q(zeta_L) as a polynomial in zeta_L of degree < phi(L).
/// Order 1 denotes a rational number and combines with any order.
class Cyclotomic {
public:
  Cyclotomic() : L_(1), c_{Rational(0)} {}
  Cyclotomic(const Rational &r) : L_(1), c_{r} {}  // NOLINT(implicit)
  Cyclotomic(long v) : Cyclotomic(Rational(v)) {}     // NOLINT(implicit)

  static Cyclotomic root_of_unity(long long L, long long k) {
    Cyclotomic z;
    z.L_ = L;
    long long e = ((k % L) + L) % L;
    std::vector<Rational> c(e + 1, Rational(0));
    c[e] = 1;
    z.c_ = std::move(c);
    z.reduce();
    return z;
  }

  long long order() const { return L_; }
  const std::vector<Rational> &coeffs() const { return c_; }

  bool is_zero() const {
    for (const auto &x : c_)
      if (x != 0) return false;
    return true;
  }

  bool is_rational() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
      if (c_[i] != 0) return false;
    return true;
  }

  /// Same number written in Q(zeta_M); the current order must divide M.
  Cyclotomic lifted_to(long long M) const {
    if (M % L_) fail(ErrorCode::RingMismatch, "order " + std::to_string(L_) + " does not divide " + std::to_string(M));
    Cyclotomic r;
    r.L_ = M;
    for (std::size_t j = 0; j < c_.size(); ++j)
      if (c_[j] != 0) r += root_of_unity(M, static_cast<long long>(j) * (M / L_)) * Cyclotomic(c_[j]);
    r.L_ = M;
    return r;
  }

  Rational rational_part() const { return c_.empty() ? Rational(0) : c_[0]; }

  std::complex<double> to_complex() const {
    std::complex<double> s = 0;
    for (std::size_t j = 0; j < c_.size(); ++j)
      if (c_[j] != 0) s += c_[j].get_d() * std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(j) / L_);
    return s;
  }

  friend Cyclotomic operator+(const Cyclotomic &a, const Cyclotomic &b) {
    long long L = common_order(a, b);
    Cyclotomic r = a.lifted(L);
    Cyclotomic bb = b.lifted(L);
    if (r.c_.size() < bb.c_.size()) r.c_.resize(bb.c_.size(), Rational(0));
    for (std::size_t i = 0; i < bb.c_.size(); ++i) r.c_[i] += bb.c_[i];
    r.reduce();
    return r;
  }
  friend Cyclotomic operator-(const Cyclotomic &a) {
    Cyclotomic r = a;
    for (auto &x : r.c_) x = -x;
    return r;
  }
  friend Cyclotomic operator-(const Cyclotomic &a, const Cyclotomic &b) { return a + (-b); }
  friend Cyclotomic operator*(const Cyclotomic &a, const Cyclotomic &b) {
    long long L = common_order(a, b);
    Cyclotomic aa = a.lifted(L), bb = b.lifted(L);
    Cyclotomic r;
    r.L_ = L;
    r.c_.assign(aa.c_.size() + bb.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < aa.c_.size(); ++i) {
      if (aa.c_[i] == 0) continue;
      for (std::size_t j = 0; j < bb.c_.size(); ++j) r.c_[i + j] += aa.c_[i] * bb.c_[j];
    }
    r.reduce();
    return r;
  }
  Cyclotomic &operator+=(const Cyclotomic &o) { return *this = *this + o; }
  Cyclotomic &operator-=(const Cyclotomic &o) { return *this = *this - o; }
  Cyclotomic &operator*=(const Cyclotomic &o) { return *this = *this * o; }

  friend bool operator==(const Cyclotomic &a, const Cyclotomic &b) {
    if (a.is_rational() && b.is_rational()) return a.rational_part() == b.rational_part();
    return a.L_ == b.L_ && a.c_ == b.c_;
  }

  /// Multiplicative inverse via the regular representation; throws on zero.
  Cyclotomic inverse() const {
    if (is_zero()) fail(ErrorCode::NonUnitLeading, "inverse of zero cyclotomic number");
    if (is_rational()) return Cyclotomic(Rational(1 / rational_part()));
    std::size_t m = static_cast<std::size_t>(euler_phi(L_));
    RMatrix M(m, m);
    for (std::size_t j = 0; j < m; ++j) {
      Cyclotomic col = *this * root_of_unity(L_, static_cast<long long>(j));
      for (std::size_t i = 0; i < col.c_.size() && i < m; ++i) M(i, j) = col.c_[i];
    }
    RationalVector e(m, Rational(0));
    e[0] = 1;
    auto x = solve(M, e);
    Cyclotomic r;
    r.L_ = L_;
    r.c_ = *x;
    r.reduce();
    return r;
  }

private:
  static long long common_order(const Cyclotomic &a, const Cyclotomic &b) {
    if (a.L_ == b.L_) return a.L_;
    if (a.is_rational()) return b.L_;
    if (b.is_rational()) return a.L_;
    fail(ErrorCode::RingMismatch,
         "cyclotomic orders " + std::to_string(a.L_) + " and " + std::to_string(b.L_) + " differ");
  }

  Cyclotomic lifted(long long L) const {
    if (L == L_) return *this;
    Cyclotomic r;
    r.L_ = L;
    r.c_ = {rational_part()};
    return r;
  }

  void reduce() {
    const auto &phi = cyclotomic_polynomial(L_);
    std::size_t m = phi.size() - 1;
    for (std::size_t i = c_.size(); i-- > m;) {
      if (c_[i] == 0) continue;
      Rational c = c_[i];
      for (std::size_t j = 0; j <= m; ++j) c_[i - m + j] -= c * Rational(static_cast<long>(phi[j]));
    }
    if (c_.size() > m) c_.resize(m);
    while (c_.size() > 1 && c_.back() == 0) c_.pop_back();
    if (c_.empty()) c_.push_back(Rational(0));
  }

  long long L_;
  std::vector<Rational> c_;
};

inline std::string format_cyclotomic(const Cyclotomic &z) {
  std::string s;
  const auto &c = z.coeffs();
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0) continue;
    if (!s.empty()) s += " + ";
    s += format_rational(c[j]);
    if (j) s += " * zeta" + std::to_string(z.order()) + "^" + std::to_string(j);
  }
  return s.empty() ? "0/1" : s;
}

} // namespace indef_theta
