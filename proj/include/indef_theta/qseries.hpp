#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cyclotomic.hpp"

namespace indef_theta {

/// Polynomial in w with rational coefficients, index = power of w.
class WPoly {
public:
  WPoly() = default;
  WPoly(const Rational &c) { if (c != 0) c_ = {c}; }  // NOLINT(implicit)
  WPoly(long v) : WPoly(Rational(v)) {}               // NOLINT(implicit)
  explicit WPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

  static WPoly w_power(int k, const Rational &c = 1) {
    std::vector<Rational> v(k + 1, Rational(0));
    v[k] = c;
    return WPoly(std::move(v));
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Rational part(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : Rational(0); }
  const std::vector<Rational> &coeffs() const { return c_; }

  double eval(double w) const {
    double s = 0;
    for (std::size_t k = c_.size(); k-- > 0;) s = s * w + c_[k].get_d();
    return s;
  }

  friend WPoly operator+(const WPoly &a, const WPoly &b) {
    std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()), Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return WPoly(std::move(r));
  }
  friend WPoly operator-(const WPoly &a) {
    WPoly r = a;
    for (auto &x : r.c_) x = -x;
    return r;
  }
  friend WPoly operator-(const WPoly &a, const WPoly &b) { return a + (-b); }
  friend WPoly operator*(const WPoly &a, const WPoly &b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> r(a.c_.size() + b.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return WPoly(std::move(r));
  }
  WPoly &operator+=(const WPoly &o) { return *this = *this + o; }
  WPoly &operator-=(const WPoly &o) { return *this = *this - o; }
  WPoly &operator*=(const WPoly &o) { return *this = *this * o; }
  friend bool operator==(const WPoly &a, const WPoly &b) { return a.c_ == b.c_; }

private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

// Coefficient-ring glue used by QSeries.

inline bool coeff_is_zero(const Rational &r) { return r == 0; }
inline bool coeff_is_zero(const WPoly &p) { return p.is_zero(); }
inline bool coeff_is_zero(const Cyclotomic &z) { return z.is_zero(); }

inline Rational coeff_inverse(const Rational &r) {
  if (r == 0) fail(ErrorCode::NonUnitLeading, "leading coefficient is zero");
  return 1 / r;
}
inline WPoly coeff_inverse(const WPoly &p) {
  if (p.degree() != 0) fail(ErrorCode::NonUnitLeading, "leading coefficient is not a unit of Q[w]");
  return WPoly(Rational(1 / p.part(0)));
}
inline Cyclotomic coeff_inverse(const Cyclotomic &z) { return z.inverse(); }

inline std::string format_coeff(const Rational &r) { return format_rational(r); }
inline std::string format_coeff(const Cyclotomic &z) { return format_cyclotomic(z); }
inline std::string format_coeff(const WPoly &p) {
  std::string s;
  for (int k = 0; k <= p.degree(); ++k) {
    if (p.part(k) == 0) continue;
    if (!s.empty()) s += " + ";
    s += format_rational(p.part(k));
    if (k) s += " * w^" + std::to_string(k);
  }
  return s.empty() ? "0/1" : s;
}

inline std::complex<double> coeff_value(const Rational &r, double) { return r.get_d(); }
inline std::complex<double> coeff_value(const WPoly &p, double w) { return p.eval(w); }
inline std::complex<double> coeff_value(const Cyclotomic &z, double) { return z.to_complex(); }

inline std::string ring_name(const Rational *) { return "rational"; }
inline std::string ring_name(const WPoly *) { return "rational[w]"; }
inline std::string ring_name(const Cyclotomic *) { return "cyclotomic"; }

/// Truncated q-expansion sum c_k q^{k/kappa}. Every coefficient with key <= horizon
/// is known exactly (absent keys are zero); nothing is claimed beyond the horizon.
template <class C> class QSeries {
public:
  static constexpr long long kExact = std::numeric_limits<long long>::max() / 4;

  explicit QSeries(long long kappa = 1, long long horizonKey = kExact) : kappa_(kappa), horizon_(horizonKey) {
    if (kappa < 1) fail(ErrorCode::DimensionMismatch, "series denominator must be positive");
  }

  /// Empty series exact through the given exponent.
  static QSeries zero_through(const Rational &horizon, long long kappa = 1) {
    QSeries s(lcm_ll(kappa, to_ll(horizon.get_den())));
    s.horizon_ = to_ll(horizon.get_num()) * (s.kappa_ / to_ll(horizon.get_den()));
    return s;
  }

  static QSeries constant(const C &c) {
    QSeries s;
    s.set(0, c);
    return s;
  }

  long long denom() const { return kappa_; }
  const std::map<long long, C> &coeffs() const { return c_; }
  bool empty() const { return c_.empty(); }
  std::size_t size() const { return c_.size(); }
  bool is_exact() const { return horizon_ >= kExact; }
  long long horizon_key() const { return horizon_; }
  Rational horizon() const {
    if (is_exact()) fail(ErrorCode::Overflow, "exact series has no finite horizon");
    return make_rational(horizon_, kappa_);
  }

  std::optional<Rational> valuation() const {
    if (c_.empty()) return std::nullopt;
    return make_rational(c_.begin()->first, kappa_);
  }

  /// Adds c q^e; terms beyond the horizon are dropped.
  void add_term(const Rational &e, const C &c) {
    long long den = to_ll(e.get_den());
    if (kappa_ % den) rescale(lcm_ll(kappa_, den));
    long long key = to_ll(e.get_num()) * (kappa_ / den);
    add_key(key, c);
  }

  void add_key(long long key, const C &c) {
    if (key > horizon_ || coeff_is_zero(c)) return;
    auto it = c_.find(key);
    if (it == c_.end()) {
      c_.emplace(key, c);
      return;
    }
    it->second += c;
    if (coeff_is_zero(it->second)) c_.erase(it);
  }

  C coefficient(const Rational &e) const {
    Rational k = e * make_rational(kappa_);
    if (!is_exact() && e > horizon()) fail(ErrorCode::Overflow, "coefficient requested beyond the exact horizon");
    if (k.get_den() != 1) return C();
    auto it = c_.find(to_ll(k.get_num()));
    return it == c_.end() ? C() : it->second;
  }

  /// Same series with denominator a multiple of the current one.
  QSeries rescaled(long long kappa) const {
    QSeries s = *this;
    s.rescale(kappa);
    return s;
  }

  /// Drops coefficients with exponent > h and lowers the horizon to h.
  QSeries truncated(const Rational &h) const {
    QSeries s = *this;
    Integer fl;
    Rational hk = h * make_rational(s.kappa_);
    mpz_fdiv_q(fl.get_mpz_t(), hk.get_num_mpz_t(), hk.get_den_mpz_t());
    long long key = to_ll(fl);
    if (key < s.horizon_) {
      s.horizon_ = key;
      s.c_.erase(s.c_.upper_bound(key), s.c_.end());
    }
    return s;
  }

  /// q -> q^M.
  QSeries substituted(long long M) const {
    QSeries s(kappa_, is_exact() ? kExact : horizon_ * M);
    for (const auto &[k, c] : c_) s.c_.emplace(k * M, c);
    return s;
  }

  template <class F> auto map_coeffs(F f) const {
    using D = decltype(f(std::declval<const C &>()));
    QSeries<D> s(kappa_, horizon_);
    for (const auto &[k, c] : c_) s.add_key(k, f(c));
    return s;
  }

  QSeries scaled(const C &a) const {
    QSeries s(kappa_, horizon_);
    if (coeff_is_zero(a)) return s;
    for (const auto &[k, c] : c_) s.add_key(k, c * a);
    return s;
  }

  friend QSeries operator+(const QSeries &a, const QSeries &b) {
    long long k = lcm_ll(a.kappa_, b.kappa_);
    QSeries x = a.rescaled(k), y = b.rescaled(k);
    QSeries s(k, std::min(x.horizon_, y.horizon_));
    for (const auto &[e, c] : x.c_) s.add_key(e, c);
    for (const auto &[e, c] : y.c_) s.add_key(e, c);
    return s;
  }
  friend QSeries operator-(const QSeries &a) { return a.scaled(C(-1)); }
  friend QSeries operator-(const QSeries &a, const QSeries &b) { return a + (-b); }

  friend QSeries operator*(const QSeries &a, const QSeries &b) {
    long long k = lcm_ll(a.kappa_, b.kappa_);
    QSeries x = a.rescaled(k), y = b.rescaled(k);
    // a zero series is known to vanish through its horizon
    long long vx = x.c_.empty() ? sat_add(x.horizon_, 1) : x.c_.begin()->first;
    long long vy = y.c_.empty() ? sat_add(y.horizon_, 1) : y.c_.begin()->first;
    long long h = std::min(sat_add(x.horizon_, vy), sat_add(y.horizon_, vx));
    QSeries s(k, std::min(h, kExact));
    for (const auto &[ex, cx] : x.c_) {
      if (sat_add(ex, vy) > s.horizon_) break;
      for (const auto &[ey, cy] : y.c_) {
        if (ex + ey > s.horizon_) break;
        s.add_key(ex + ey, cx * cy);
      }
    }
    return s;
  }

  QSeries &operator+=(const QSeries &o) { return *this = *this + o; }
  QSeries &operator-=(const QSeries &o) { return *this = *this - o; }
  QSeries &operator*=(const QSeries &o) { return *this = *this * o; }

  /// Multiplicative inverse; the leading coefficient must be a unit.
  QSeries inverse() const {
    if (c_.empty()) fail(ErrorCode::NonUnitLeading, "inverse of a series with no known nonzero term");
    long long v = c_.begin()->first;
    C lead_inv = coeff_inverse(c_.begin()->second);
    if (is_exact() && c_.size() == 1) {
      QSeries s(kappa_);
      s.set(-v, lead_inv);
      return s;
    }
    if (is_exact()) fail(ErrorCode::NonUnitLeading, "inverse of a polynomial needs a finite horizon");
    // u = q^{-v} a / lead, known through relative key H
    long long H = horizon_ - v;
    std::vector<C> u(H + 1), inv(H + 1);
    for (const auto &[e, c] : c_) u[e - v] = c * lead_inv;
    inv[0] = C(1);
    for (long long n = 1; n <= H; ++n) {
      C acc;
      for (const auto &[e, c] : c_) {
        long long j = e - v;
        if (j == 0) continue;
        if (j > n) break;
        if (!coeff_is_zero(inv[n - j])) acc += u[j] * inv[n - j];
      }
      inv[n] = -acc;
    }
    QSeries s(kappa_, H - v);
    for (long long n = 0; n <= H; ++n)
      if (!coeff_is_zero(inv[n])) s.add_key(n - v, inv[n] * lead_inv);
    return s;
  }

  friend QSeries operator/(const QSeries &a, const QSeries &b) {
    long long k = lcm_ll(a.kappa_, b.kappa_);
    return a.rescaled(k) * b.rescaled(k).inverse();
  }

  QSeries pow(int e) const {
    if (e < 0) return inverse().pow(-e);
    QSeries r = constant(C(1)), base = *this;
    while (e) {
      if (e & 1) r *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return r;
  }

  /// Numeric value at q = exp(2 pi i tau), with w substituted for Q[w] coefficients.
  std::complex<double> evaluate(std::complex<double> tau, double w = 0) const {
    std::complex<double> s = 0;
    const std::complex<double> twopii(0, 2 * std::numbers::pi);
    for (const auto &[k, c] : c_) s += coeff_value(c, w) * std::exp(twopii * tau * (static_cast<double>(k) / kappa_));
    return s;
  }

  /// Canonical text: one line per term, "q^<num>/<den> : <coeff>", sorted by exponent.
  std::string to_text() const {
    std::ostringstream os;
    for (const auto &[k, c] : c_) os << "q^" << format_rational(make_rational(k, kappa_)) << " : " << format_coeff(c) << "\n";
    return os.str();
  }

  /// Equality of the coefficients both operands know exactly.
  friend bool agree_to_shared_horizon(const QSeries &a, const QSeries &b) { return first_difference(a, b) == std::nullopt; }

  /// Smallest exponent (within the shared horizon) where the operands differ.
  friend std::optional<Rational> first_difference(const QSeries &a, const QSeries &b) {
    QSeries d = a - b;
    if (d.c_.empty()) return std::nullopt;
    return make_rational(d.c_.begin()->first, d.kappa_);
  }

  friend bool operator==(const QSeries &a, const QSeries &b) {
    long long k = lcm_ll(a.kappa_, b.kappa_);
    QSeries x = a.rescaled(k), y = b.rescaled(k);
    return x.horizon_ == y.horizon_ && x.c_ == y.c_;
  }

private:
  void set(long long key, const C &c) {
    if (!coeff_is_zero(c)) c_[key] = c;
  }

  static long long lcm_ll(long long a, long long b) { return std::lcm(a, b); }
  static long long sat_add(long long a, long long b) {
    if (a >= kExact || b >= kExact) return kExact;
    return a + b;
  }

  void rescale(long long kappa) {
    if (kappa == kappa_) return;
    if (kappa % kappa_) fail(ErrorCode::DimensionMismatch, "rescale to a non-multiple denominator");
    long long f = kappa / kappa_;
    std::map<long long, C> c;
    for (auto &[k, v] : c_) c.emplace(k * f, std::move(v));
    c_ = std::move(c);
    if (!is_exact()) horizon_ *= f;
    kappa_ = kappa;
  }

  template <class D> friend class QSeries;

  long long kappa_;
  long long horizon_;
  std::map<long long, C> c_;
};

using RationalSeries = QSeries<Rational>;
using WSeries = QSeries<WPoly>;
using CycloSeries = QSeries<Cyclotomic>;

/// Rational series embedded at w^0.
inline WSeries to_w(const RationalSeries &s) {
  return s.map_coeffs([](const Rational &c) { return WPoly(c); });
}

inline CycloSeries to_cyclo(const RationalSeries &s) {
  return s.map_coeffs([](const Rational &c) { return Cyclotomic(c); });
}

/// The w^k part of a Q[w] series.
inline RationalSeries w_part(const WSeries &s, int k) {
  return s.map_coeffs([k](const WPoly &p) { return p.part(k); });
}

} // namespace indef_theta
