#pragma once

#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "cyclotomic.hpp"
#include "quadform.hpp"

namespace indef_theta {

/// m : Z^n -> Q(zeta), periodic modulo L Z^n, stored on the torus (Z/L)^n.
class PeriodicWeight {
public:
  PeriodicWeight() = default;

  static PeriodicWeight constant(std::size_t n, const Cyclotomic &c = Cyclotomic(1)) {
    return from_function(1, n, [&](const IntVector &) { return c; });
  }

  static PeriodicWeight from_function(long long L, std::size_t n, const std::function<Cyclotomic(const IntVector &)> &fn) {
    if (L < 1) fail(ErrorCode::SchemaError, "weight period must be positive");
    if (n == 0) fail(ErrorCode::DimensionMismatch, "weight needs a positive dimension");
    PeriodicWeight w;
    w.L_ = L;
    w.n_ = n;
    std::size_t size = 1;
    for (std::size_t i = 0; i < n; ++i) {
      size *= static_cast<std::size_t>(L);
      if (size > 5'000'000) fail(ErrorCode::BoundTooLarge, "weight table too large");
    }
    w.values_.reserve(size);
    IntVector r(n, 0);
    for (std::size_t idx = 0; idx < size; ++idx) {
      std::size_t t = idx;
      for (std::size_t i = 0; i < n; ++i) {
        r[i] = static_cast<long long>(t % L);
        t /= L;
      }
      w.values_.push_back(fn(r));
    }
    return w;
  }

  /// Explicit table in the index order sum_i r_i L^i.
  static PeriodicWeight from_table(long long L, std::size_t n, std::vector<Cyclotomic> values) {
    std::size_t size = 1;
    for (std::size_t i = 0; i < n; ++i) size *= static_cast<std::size_t>(L);
    if (values.size() != size) fail(ErrorCode::SchemaError, "weight table needs L^n = " + std::to_string(size) + " values");
    PeriodicWeight w;
    w.L_ = L;
    w.n_ = n;
    w.values_ = std::move(values);
    return w;
  }

  /// prod_j (D_j / a_j . l) for discriminants D_j (D = 0, 1 mod 4), period lcm |D_j|.
  static PeriodicWeight kronecker_product(std::size_t n, const std::vector<std::pair<long long, IntVector>> &chars) {
    long long L = 1;
    for (const auto &[D, a] : chars) {
      if (a.size() != n) fail(ErrorCode::DimensionMismatch, "linear form length vs dimension");
      long long m = ((D % 4) + 4) % 4;
      if (D == 0 || (m != 0 && m != 1)) fail(ErrorCode::SchemaError, "Kronecker weight needs a discriminant D = 0,1 mod 4");
      long long P = std::llabs(D);
      for (long long x = -2 * P; x <= 2 * P; ++x)
        if (kronecker(D, x) != kronecker(D, x + P)) fail(ErrorCode::SchemaError, "(D/.) is not |D|-periodic for D = " + std::to_string(D));
      L = std::lcm(L, P);
    }
    return from_function(L, n, [&](const IntVector &r) {
      long long v = 1;
      for (const auto &[D, a] : chars) {
        long long x = 0;
        for (std::size_t i = 0; i < n; ++i) x += a[i] * r[i];
        v *= kronecker(D, x);
      }
      return Cyclotomic(Rational(static_cast<long>(v)));
    });
  }

  /// l -> exp(2 pi i B(l, b)); the period is the denominator of A b.
  static PeriodicWeight twist(const QuadraticForm &form, const RationalVector &b) {
    RationalVector u = form.matrix_q() * b;
    long long L = to_ll(lcm_of_denominators(u));
    std::size_t n = form.dim();
    return from_function(L, n, [&](const IntVector &r) {
      Rational t = 0;
      for (std::size_t i = 0; i < n; ++i) t += u[i] * make_rational(r[i]);
      t *= make_rational(L);
      long long k = to_ll(t.get_num());
      return L == 1 ? Cyclotomic(1) : Cyclotomic::root_of_unity(L, k);
    });
  }

  friend PeriodicWeight operator*(const PeriodicWeight &a, const PeriodicWeight &b) {
    if (a.n_ != b.n_) fail(ErrorCode::DimensionMismatch, "weights of different dimensions");
    long long L = std::lcm(a.L_, b.L_);
    return from_function(L, a.n_, [&](const IntVector &r) { return a(r) * b(r); });
  }

  long long period() const { return L_; }
  std::size_t dim() const { return n_; }
  const std::vector<Cyclotomic> &values() const { return values_; }

  Cyclotomic operator()(const IntVector &l) const {
    if (l.size() != n_) fail(ErrorCode::DimensionMismatch, "weight argument length");
    std::size_t idx = 0;
    for (std::size_t i = n_; i-- > 0;) idx = idx * L_ + static_cast<std::size_t>(((l[i] % L_) + L_) % L_);
    return values_[idx];
  }

  bool is_rational() const {
    for (const auto &v : values_)
      if (!v.is_rational()) return false;
    return true;
  }

  /// Smallest M with every value in Q(zeta_M).
  long long value_order() const {
    long long M = 1;
    for (const auto &v : values_)
      if (!v.is_rational()) M = std::lcm(M, v.order());
    return M;
  }

private:
  long long L_ = 1;
  std::size_t n_ = 0;
  std::vector<Cyclotomic> values_;
};

} // namespace indef_theta
