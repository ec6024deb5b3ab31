#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <deque>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "theta.hpp"

namespace indef_theta {

using Complex = std::complex<double>;

struct UpperHalfPoint {
  double x = 0, y = 1;
  UpperHalfPoint() = default;
  UpperHalfPoint(double re, double im) : x(re), y(im) {
    if (!(im > 0)) fail(ErrorCode::NegativeArgument, "tau must lie in the upper half plane");
  }
  explicit UpperHalfPoint(Complex t) : UpperHalfPoint(t.real(), t.imag()) {}
  Complex tau() const { return {x, y}; }
};

struct NumericConfig {
  double targetAbsTol = 1e-10;
  double tailSafety = 10;
  double maxPoints = 2e7;  // enumeration cap
  unsigned workers = 0;    // 0: worker_count()
};

// ---------------------------------------------------------------------------
// Special functions

namespace numeric_detail {

inline constexpr double kPi = std::numbers::pi;

/// e^{a^2} erfc(a) for a >= 0.
inline double erfcx(double a) {
  if (a < 25) return std::exp(a * a) * std::erfc(a);
  double inv = 1 / (2 * a * a), s = 1, t = 1;
  for (int k = 1; k <= 6; ++k) {
    t *= -(2 * k - 1) * inv;
    s += t;
  }
  return s / (a * std::sqrt(kPi));
}

/// Coefficients of P_k with E^{(k)}(z) = P_k(z) e^{-pi z^2}.
inline std::vector<double> e_poly(int k) {
  static std::mutex mu;
  static std::deque<std::vector<double>> cache{{}, {2.0}};
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(cache.size()) <= k) {
    const auto &p = cache.back();
    std::vector<double> next(p.size() + 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) next[i - 1] += static_cast<double>(i) * p[i];
    for (std::size_t i = 0; i < p.size(); ++i) next[i + 1] -= 2 * kPi * p[i];
    cache.push_back(std::move(next));
  }
  return cache[k];
}

inline double horner(const std::vector<double> &p, double z) {
  double s = 0;
  for (std::size_t i = p.size(); i-- > 0;) s = s * z + p[i];
  return s;
}

inline double abs_poly(const std::vector<double> &p, double r) {
  double s = 0;
  for (std::size_t i = p.size(); i-- > 0;) s = s * r + std::abs(p[i]);
  return s;
}

inline double l1_norm(const Polynomial &p) {
  double s = 0;
  for (const auto &[m, c] : p.terms()) s += std::abs(c.get_d());
  return s;
}

inline std::vector<double> to_doubles(const RationalVector &v) {
  std::vector<double> out;
  for (const auto &x : v) out.push_back(x.get_d());
  return out;
}

/// Almost holomorphic polynomial at a fixed w, flattened to double monomials.
class FlatPoly {
public:
  FlatPoly() = default;
  FlatPoly(const AlmostPolynomial &p, double w) : n_(p.nvars()) {
    double wk = 1;
    for (const auto &part : p.parts()) {
      for (const auto &[m, c] : part.terms()) {
        coef_.push_back(c.get_d() * wk);
        for (std::size_t i = 0; i < n_; ++i) {
          exps_.push_back(m[i]);
          maxExp_ = std::max(maxExp_, m[i]);
        }
      }
      wk *= w;
    }
  }

  double operator()(const std::vector<double> &v) const {
    if (coef_.empty()) return 0;
    thread_local std::vector<double> pw;
    std::size_t stride = static_cast<std::size_t>(maxExp_) + 1;
    pw.resize(n_ * stride);
    for (std::size_t i = 0; i < n_; ++i) {
      pw[i * stride] = 1;
      for (std::size_t e = 1; e < stride; ++e) pw[i * stride + e] = pw[i * stride + e - 1] * v[i];
    }
    double s = 0;
    const int *ex = exps_.data();
    for (double c : coef_) {
      double t = c;
      for (std::size_t i = 0; i < n_; ++i, ++ex) t *= pw[i * stride + static_cast<std::size_t>(*ex)];
      s += t;
    }
    return s;
  }

private:
  std::size_t n_ = 0;
  int maxExp_ = 0;
  std::vector<double> coef_;
  std::vector<int> exps_;
};

} // namespace numeric_detail

/// E(z) = 2 int_0^z e^{-pi u^2} du = erf(sqrt(pi) z).
inline double E_func(double z) { return std::erf(std::sqrt(numeric_detail::kPi) * z); }

/// k-th derivative of E; k = 0 gives E itself.
inline double E_deriv(int k, double z) {
  if (k < 0) fail(ErrorCode::NegativeArgument, "derivative order must be >= 0");
  if (k == 0) return E_func(z);
  return numeric_detail::horner(numeric_detail::e_poly(k), z) * std::exp(-numeric_detail::kPi * z * z);
}

/// beta(x) = int_x^infty u^{-1/2} e^{-pi u} du = erfc(sqrt(pi x)).
inline double beta_func(double x) {
  if (x < 0) fail(ErrorCode::NegativeArgument, "beta needs x >= 0");
  return std::erfc(std::sqrt(numeric_detail::kPi * x));
}

// ---------------------------------------------------------------------------
// Kernel p^c[f]

/// p^c[f] for a cone vector c (normalized internally to Q(c) = -1), split as
/// p(v) = sgn(z) f^(v) + e^{-pi z^2} rest(v), z = B(c^, v).
class PKernel {
public:
  PKernel(const QuadraticForm &form, const RationalVector &c, const Polynomial &f) : n_(form.dim()) {
    if (c.size() != n_ || f.nvars() != n_) fail(ErrorCode::DimensionMismatch, "kernel dimensions");
    Rational qc = eval_Q(form, c);
    if (qc >= 0) fail(ErrorCode::NotNegativeNorm, "cone vector needs Q(c) < 0");
    s_ = 1 / std::sqrt(-qc.get_d());
    RationalVector u = form.matrix_q() * c;
    for (const auto &x : u) u_.push_back(s_ * x.get_d());
    d_ = f.is_zero() ? 0 : f.degree();
    AlmostPolynomial fh = hat(form, f.is_zero() ? Polynomial::constant(n_, 0) : f);
    double fact = 1;
    for (int k = 0; k <= d_; ++k) {
      if (k) fact *= k;
      derivs_.push_back(dir_deriv(c, fh, k));
      flat_.emplace_back(derivs_.back(), kW);
      coef_.push_back((k % 2 ? -1.0 : 1.0) * std::pow(s_, k) / (std::pow(4 * numeric_detail::kPi, k) * fact));
      polys_.push_back(k ? numeric_detail::e_poly(k) : std::vector<double>{});
      std::vector<double> norms;
      for (const auto &p : derivs_.back().parts()) norms.push_back(numeric_detail::l1_norm(p));
      l1_.push_back(std::move(norms));
    }
  }

  int degree() const { return d_; }
  std::size_t dim() const { return n_; }

  double z(const std::vector<double> &v) const {
    double s = 0;
    for (std::size_t i = 0; i < n_; ++i) s += u_[i] * v[i];
    return s;
  }

  double hat_value(const std::vector<double> &v) const { return flat_[0](v); }

  /// rest(v) for a given sign convention at z (the split is exact for any choice at z = 0).
  double rest(const std::vector<double> &v, double zz, int sg) const { return rest(v, zz, sg, hat_value(v)); }

  /// Same, with f^(v) already known.
  double rest(const std::vector<double> &v, double zz, int sg, double hat) const {
    double r = sg ? -sg * numeric_detail::erfcx(std::sqrt(numeric_detail::kPi) * std::abs(zz)) * hat : 0.0;
    for (int k = 1; k <= d_; ++k) {
      if (derivs_[k].w_degree() < 0) continue;
      r += coef_[k] * numeric_detail::horner(polys_[k], zz) * flat_[k](v);
    }
    return r;
  }

  double operator()(const std::vector<double> &v) const {
    double zz = z(v);
    int sg = (zz > 0) - (zz < 0);
    return sg * hat_value(v) + std::exp(-numeric_detail::kPi * zz * zz) * rest(v, zz, sg);
  }

  /// Upper bound of y^{-d/2} |f^(l sqrt y)| for |l| <= r.
  double hat_bound(double r, double y) const { return part_bound(0, r, y); }

  /// Upper bound of y^{-d/2} |rest(l sqrt y)| for |l| <= r.
  double rest_bound(double r, double y) const {
    double unorm = 0;
    for (double x : u_) unorm += x * x;
    unorm = std::sqrt(unorm);
    double b = part_bound(0, r, y);
    for (int k = 1; k <= d_; ++k)
      b += std::abs(coef_[k]) * numeric_detail::abs_poly(polys_[k], std::sqrt(y) * unorm * r) * part_bound(k, r, y) *
           std::pow(y, -0.5 * k);
    return b;
  }

private:
  static constexpr double kW = 1 / (8 * std::numbers::pi);

  // sum_j |part_{k,j}|_1 r^{d-2j-k} (1/(8 pi y))^j
  double part_bound(int k, double r, double y) const {
    double s = 0;
    const auto &norms = l1_[k];
    for (std::size_t j = 0; j < norms.size(); ++j) {
      int deg = d_ - 2 * static_cast<int>(j) - k;
      if (deg < 0 || norms[j] == 0) continue;
      s += norms[j] * std::pow(r, deg) * std::pow(kW / y, static_cast<double>(j));
    }
    return s;
  }

  std::size_t n_;
  int d_ = 0;
  double s_ = 1;
  std::vector<double> u_;
  std::vector<AlmostPolynomial> derivs_;
  std::vector<numeric_detail::FlatPoly> flat_;
  std::vector<double> coef_;
  std::vector<std::vector<double>> polys_;
  std::vector<std::vector<double>> l1_;
};

inline double p_kernel(const QuadraticForm &form, const RationalVector &c, const Polynomial &f, const std::vector<double> &v) {
  return PKernel(form, c, f)(v);
}

// ---------------------------------------------------------------------------
// Non-holomorphic theta series

struct NumericValue {
  Complex value;
  double errorEstimate = 0;
  std::size_t points = 0;
  double radius = 0;  // R with y Q_X(l) <= R enumerated
};

namespace numeric_detail {

struct Region {
  SquareCompletion<double> sc;
  double minEigen;
  std::vector<double> gram;  // row-major, l^T G l
};

inline Region region_of(const PosDefForm &p) {
  std::size_t n = p.G.rows();
  Eigen::MatrixXd G(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) G(i, j) = p.G(i, j).get_d();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  std::vector<double> gram(G.data(), G.data() + n * n);
  return Region{to_double(complete_squares(p.G)), es.eigenvalues().minCoeff(), std::move(gram)};
}

inline double unit_ball_volume(std::size_t n) {
  double nd = static_cast<double>(n);
  return std::pow(kPi, nd / 2) / std::tgamma(nd / 2 + 1);
}

} // namespace numeric_detail

/// Theta~ at tau: the lattice sum over the union of {y Q_X(l) <= R} for X in
/// {Q+ minorant, Q_c1, Q_c2}, with R grown until the tail envelope is below
/// targetAbsTol / tailSafety.
inline NumericValue modtheta_eval(const ThetaSpec &s, const UpperHalfPoint &tau, const NumericConfig &cfg = {}) {
  using namespace numeric_detail;
  detail::check_spec(s);
  std::size_t n = s.form.dim();
  if (linearly_dependent(s.c1.c, s.c2.c)) return NumericValue{0, 0, 0, 0};
  PKernel k1(s.form, s.c1.c, s.f), k2(s.form, s.c2.c, s.f);
  std::vector<Region> regions = {region_of(qplus_form(s.form, s.c1, s.c2)), region_of(qc_form(s.form, s.c1)),
                                 region_of(qc_form(s.form, s.c2))};
  double mu = regions[0].minEigen;
  for (const auto &r : regions) mu = std::min(mu, r.minEigen);
  double mmax = 1;
  if (s.m) {
    mmax = 0;
    for (const auto &v : s.m->values()) mmax = std::max(mmax, std::abs(v.to_complex()));
  }
  const double y = tau.y;
  const double vn = unit_ball_volume(n), half = std::sqrt(static_cast<double>(n)) / 2;

  // points with min_X y Q_X(l) in [j, j+1) have |l| <= sqrt((j+1)/(y mu))
  auto tail = [&](double R) {
    double t = 0;
    for (double j = R; j < R + 400; j += 1) {
      double rho = std::sqrt((j + 1) / (y * mu));
      double count = vn * std::pow(rho + half, static_cast<double>(n));
      double env = mmax * (2 * k1.hat_bound(rho, y) + k1.rest_bound(rho, y) + k2.rest_bound(rho, y));
      double term = env * count * std::exp(-2 * kPi * j);
      t += term;
      if (term <= 1e-20 * t) break;
    }
    return t;
  };
  double target = cfg.targetAbsTol / cfg.tailSafety;
  double R = 0.5;
  while (tail(R) > target) {
    R += 0.25;
    if (R > 1e4) fail(ErrorCode::ToleranceUnreachable, "tail bound does not reach the target tolerance");
  }
  double estimate = 0;
  for (const auto &r : regions) estimate += ellipsoid_volume(r.sc, R / y);
  if (estimate > cfg.maxPoints)
    fail(ErrorCode::ToleranceUnreachable, "about " + std::to_string(static_cast<long long>(estimate)) +
                                              " lattice points needed at y = " + std::to_string(y));

  // each point is kept by the first region whose own test accepts it, so no dedup pass is needed
  std::vector<double> lam = to_doubles(s.lambda);
  const double M = R / y;
  std::vector<std::vector<double>> grams;
  for (const auto &r : regions) grams.push_back(r.gram);
  auto inside = [&](std::size_t ri, const std::vector<double> &l) {
    const auto &G = grams[ri];
    double q = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) q += l[i] * G[i * n + j] * l[j];
    return q <= M;
  };
  std::vector<long long> pts;
  std::vector<double> lbuf(n);
  for (std::size_t ri = 0; ri < regions.size(); ++ri) {
    try {
      enumerate_visit_float(
          regions[ri].sc, lam, M * (1 + 1e-9) + 1e-9,
          [&](const IntVector &k) {
            for (std::size_t i = 0; i < n; ++i) lbuf[i] = lam[i] + static_cast<double>(k[i]);
            if (!inside(ri, lbuf)) return;
            for (std::size_t rj = 0; rj < ri; ++rj)
              if (inside(rj, lbuf)) return;
            pts.insert(pts.end(), k.begin(), k.end());
          },
          cfg.maxPoints);
    } catch (const Error &e) {
      if (e.code() == ErrorCode::BoundTooLarge) fail(ErrorCode::ToleranceUnreachable, e.what());
      throw;
    }
  }
  const std::size_t count = pts.size() / std::max<std::size_t>(n, 1);

  const RMatrix &Aq = s.form.matrix_q();
  std::vector<double> A(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A[i * n + j] = Aq(i, j).get_d();
  const double sy = std::sqrt(y), ypow = std::pow(y, -0.5 * k1.degree());
  std::vector<Complex> vals(count);
  parallel_for(count, cfg.workers ? cfg.workers : worker_count(), [&](std::size_t idx) {
    thread_local std::vector<double> l, v;
    l.resize(n);
    v.resize(n);
    const long long *k = &pts[idx * n];
    for (std::size_t i = 0; i < n; ++i) {
      l[i] = lam[i] + static_cast<double>(k[i]);
      v[i] = l[i] * sy;
    }
    double Q = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) Q += 0.5 * l[i] * A[i * n + j] * l[j];
    double z1 = k1.z(v), z2 = k2.z(v);
    int s1 = (z1 > 0) - (z1 < 0), s2 = (z2 > 0) - (z2 < 0);
    double h = k1.hat_value(v);
    double total = 0;
    if (s1 != s2) total += (s1 - s2) * h * std::exp(-2 * kPi * y * Q);
    total += k1.rest(v, z1, s1, h) * std::exp(-kPi * z1 * z1 - 2 * kPi * y * Q);
    total -= k2.rest(v, z2, s2, h) * std::exp(-kPi * z2 * z2 - 2 * kPi * y * Q);
    Complex m = 1;
    if (s.m) m = (*s.m)(IntVector(k, k + n)).to_complex();
    vals[idx] = m * ypow * total * std::polar(1.0, 2 * kPi * tau.x * Q);
  });
  double absSum = 0;
  for (const auto &v : vals) absSum += std::abs(v);
  return NumericValue{pairwise_sum(vals), tail(R) + 1e-15 * absSum, count, R};
}

inline NumericValue modtheta_family(const ThetaFamily &fam, const UpperHalfPoint &tau, const NumericConfig &cfg = {}) {
  NumericValue out{0, 0, 0, 0};
  for (const auto &t : fam.terms) {
    RationalVector gc = t.g.cast<Rational>() * fam.c.c;
    ThetaSpec s{fam.form, fam.c, make_cone_vector(fam.form, gc, fam.c.c), t.f, fam.lambda, t.m, fam.maxQ};
    auto v = modtheta_eval(s, tau, cfg);
    out.value += v.value;
    out.errorEstimate += v.errorEstimate;
    out.points += v.points;
    out.radius = std::max(out.radius, v.radius);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checks

struct CheckReport {
  enum class Status { Pass, Fail, Untested };
  std::string test, gamma, tau;
  double residual = 0, tol = 0;
  Status status = Status::Untested;

  bool passed() const { return status == Status::Pass; }
  std::string status_text() const {
    return status == Status::Pass ? "PASS" : status == Status::Fail ? "FAIL" : "UNTESTED";
  }
  /// "test, gamma, tau, |residual|, tol, PASS/FAIL"
  std::string line() const {
    std::ostringstream os;
    os.precision(3);
    os << test << ", " << gamma << ", " << tau << ", " << std::scientific << residual << ", " << tol << ", " << status_text();
    return os.str();
  }
};

inline std::string format_tau(const Complex &t) {
  std::ostringstream os;
  os.precision(6);
  os << t.real() << (t.imag() < 0 ? "-" : "+") << std::abs(t.imag()) << "i";
  return os.str();
}

inline std::string format_gamma(const IMatrix &g) {
  return "[[" + std::to_string(g(0, 0)) + "," + std::to_string(g(0, 1)) + "],[" + std::to_string(g(1, 0)) + "," +
         std::to_string(g(1, 1)) + "]]";
}

inline Complex moebius(const IMatrix &g, const Complex &tau) {
  return (static_cast<double>(g(0, 0)) * tau + static_cast<double>(g(0, 1))) /
         (static_cast<double>(g(1, 0)) * tau + static_cast<double>(g(1, 1)));
}

inline CheckReport finish(CheckReport r, double residual, double tol) {
  r.residual = residual;
  r.tol = tol;
  r.status = residual < tol ? CheckReport::Status::Pass : CheckReport::Status::Fail;
  return r;
}

/// Theta~(gamma tau) - chi(gamma) (c tau + d)^{n/2+d} Theta~(tau), principal branch.
inline CheckReport check_gamma_transform(const ThetaSpec &s, const IMatrix &gamma, const UpperHalfPoint &tau, double tol,
                                         const NumericConfig &cfg = {}, const std::string &name = "gamma") {
  for (const auto &x : s.lambda)
    if (x != 0) fail(ErrorCode::SchemaError, "the Gamma_0(N) law is stated for lambda = 0");
  if (s.m) fail(ErrorCode::SchemaError, "the Gamma_0(N) law is stated without periodic weights");
  int k = chi(character_of(s.form), gamma);
  Complex chiv = std::pow(Complex(0, 1), k);
  Complex gt = moebius(gamma, tau.tau());
  double weight = static_cast<double>(s.form.dim()) / 2 + (s.f.is_zero() ? 0 : s.f.degree());
  Complex j = static_cast<double>(gamma(1, 0)) * tau.tau() + static_cast<double>(gamma(1, 1));
  auto lhs = modtheta_eval(s, UpperHalfPoint(gt), cfg);
  auto rhs = modtheta_eval(s, tau, cfg);
  CheckReport r{name, format_gamma(gamma), format_tau(tau.tau())};
  return finish(r, std::abs(lhs.value - chiv * std::pow(j, weight) * rhs.value), tol);
}

/// Theta~_lambda(-1/tau) against (-i tau)^{n/2+d} (-i)^{d+1} |det A|^{-1/2} sum_mu e(B(lambda,mu)) Theta~_mu(tau).
inline CheckReport check_s_transform(const ThetaSpec &s, const UpperHalfPoint &tau, double tol, const NumericConfig &cfg = {},
                                     const std::string &name = "S") {
  CheckReport r{name, "[[0,-1],[1,0]]", format_tau(tau.tau())};
  long long det = std::llabs(s.form.det());
  if (det > 64 || s.m) {
    r.tol = tol;
    return r;  // untested
  }
  int d = s.f.is_zero() ? 0 : s.f.degree();
  auto data = theta_characteristic_transform_data(s.form, s.lambda, d);
  ThetaSpec at = s;
  auto lhs = modtheta_eval(at, UpperHalfPoint(-1.0 / tau.tau()), cfg);
  Complex sum = 0;
  for (const auto &e : data.sTable) {
    at.lambda = e.mu;
    sum += e.coefficient.to_complex() * std::pow(static_cast<double>(det), 0.5 * e.detPowerTimesTwo) *
           modtheta_eval(at, tau, cfg).value;
  }
  double weight = static_cast<double>(s.form.dim()) / 2 + d;
  Complex rhs = std::pow(Complex(0, -1) * tau.tau(), weight) * sum;
  return finish(r, std::abs(lhs.value - rhs), tol);
}

/// Theta~_lambda(tau + 1) against e^{2 pi i Q(lambda)} Theta~_lambda(tau).
inline CheckReport check_t_transform(const ThetaSpec &s, const UpperHalfPoint &tau, double tol, const NumericConfig &cfg = {},
                                     const std::string &name = "T") {
  auto data = theta_characteristic_transform_data(s.form, s.lambda, s.f.is_zero() ? 0 : s.f.degree());
  auto lhs = modtheta_eval(s, UpperHalfPoint(tau.x + 1, tau.y), cfg);
  auto rhs = modtheta_eval(s, tau, cfg);
  CheckReport r{name, "[[1,1],[0,1]]", format_tau(tau.tau())};
  return finish(r, std::abs(lhs.value - data.tMultiplier.to_complex() * rhs.value), tol);
}

struct OdeReport {
  double maxRelError = 0;
  double maxAbsError = 0;
  std::size_t samples = 0;
  double h = 0;
  bool richardson = true;
};

/// (E - Delta/(4 pi)) p - d p for p = p^{c1}[f] - p^{c2}[f] by central differences,
/// relative to max(1, |E p| + |Delta p|/(4 pi) + d |p|).
inline OdeReport check_vigneras_ode(const QuadraticForm &form, const RationalVector &c1, const RationalVector &c2,
                                    const Polynomial &f, const std::vector<std::vector<double>> &points, double h = 1e-3,
                                    bool richardson = true) {
  PKernel k1(form, c1, f), k2(form, c2, f);
  std::size_t n = form.dim();
  int d = k1.degree();
  const RMatrix &Minv = form.inverse();
  auto p = [&](std::vector<double> v) { return k1(v) - k2(v); };
  struct Parts {
    double euler, lap;
  };
  auto diff = [&](const std::vector<double> &v, double hh) {
    Parts out{0, 0};
    auto at = [&](std::size_t i, double si, std::size_t j, double sj) {
      std::vector<double> w = v;
      w[i] += si * hh;
      w[j] += sj * hh;
      return p(w);
    };
    double p0 = p(v);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> a = v, b = v;
      a[i] += hh;
      b[i] -= hh;
      out.euler += v[i] * (p(a) - p(b)) / (2 * hh);
      for (std::size_t j = 0; j < n; ++j) {
        double mij = Minv(i, j).get_d();
        if (mij == 0) continue;
        double dij = i == j ? (p(a) - 2 * p0 + p(b)) / (hh * hh)
                            : (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) / (4 * hh * hh);
        out.lap += mij * dij;
      }
    }
    return out;
  };
  OdeReport rep{0, 0, points.size(), h, richardson};
  for (const auto &v : points) {
    if (v.size() != n) fail(ErrorCode::DimensionMismatch, "sample point dimension");
    Parts a = diff(v, h);
    if (richardson) {
      Parts b = diff(v, h / 2);
      a = Parts{(4 * b.euler - a.euler) / 3, (4 * b.lap - a.lap) / 3};
    }
    double pv = p(v);
    double lhs = a.euler - a.lap / (4 * numeric_detail::kPi);
    double scale = std::max(1.0, std::abs(a.euler) + std::abs(a.lap) / (4 * numeric_detail::kPi) + d * std::abs(pv));
    rep.maxAbsError = std::max(rep.maxAbsError, std::abs(lhs - d * pv));
    rep.maxRelError = std::max(rep.maxRelError, std::abs(lhs - d * pv) / scale);
  }
  return rep;
}

/// Precision for evaluating an exact series at height y: e^{-2 pi y maxQ} <= e^{-70}.
inline Rational series_precision_for(double y) {
  return make_rational(std::max<long long>(20, static_cast<long long>(std::ceil(70 / (2 * numeric_detail::kPi * y)))));
}

/// |sum Theta~ - sum Theta^| at tau; the family condition is not enforced here, so the
/// same routine serves as a negative control.
inline CheckReport check_completion_equality(const ThetaFamily &fam, const UpperHalfPoint &tau, double tol,
                                             const NumericConfig &cfg = {}, const std::string &name = "completion") {
  ThetaFamily f = fam;
  f.maxQ = series_precision_for(tau.y);
  WSeries hat = detail::family_sum<WSeries>(f, theta_almost);
  Complex exact = hat.evaluate(tau.tau(), 1 / (8 * numeric_detail::kPi * tau.y));
  auto num = modtheta_family(f, tau, cfg);
  return finish(CheckReport{name, "-", format_tau(tau.tau())}, std::abs(num.value - exact), tol);
}

/// Random element of Gamma_0(N) with c in {-k N, ..., k N} (k = maxCMultiple) and |d| <= 5.
inline IMatrix random_gamma0(long long N, std::mt19937_64 &rng, int maxCMultiple = 1) {
  std::uniform_int_distribution<int> cm(-maxCMultiple, maxCMultiple), small(-3, 3), dd(-5, 5);
  while (true) {
    long long c = N * cm(rng);
    if (c == 0) {
      long long d = small(rng) >= 0 ? 1 : -1;
      return IMatrix{{d, small(rng)}, {0, d}};
    }
    long long d = dd(rng);
    if (std::gcd(c, d) != 1) continue;
    long long cabs = std::llabs(c), a = 1;
    while (((a * d) % cabs + cabs) % cabs != 1 % cabs) ++a;
    long long b = (a * d - 1) / c;
    return IMatrix{{a, b}, {c, d}};
  }
}

/// Random tau with x in [-1/2, 1/2] and y in [ymin, ymax].
inline UpperHalfPoint random_tau(std::mt19937_64 &rng, double ymin = 0.5, double ymax = 1.0) {
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(ymin, ymax);
  double x = ux(rng);
  return UpperHalfPoint(x, uy(rng));
}

} // namespace indef_theta
