#pragma once

#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "eta.hpp"
#include "pell.hpp"
#include "theta.hpp"

namespace indef_theta {

/// A built-in family together with the identity its theta series should satisfy.
struct Example {
  std::string id;
  std::string title;
  IMatrix A;
  RationalVector c;
  std::vector<ThetaTerm> terms;
  Rational prefactor = 1;  // applied to the theta side
  std::string identity;
  bool almost = false;     // compare the full Q[w] series, not only its w^0 part
  bool spherical = false;  // all f_i spherical, so the sum must be holomorphic
  int degree = 0;
  Rational maxQ = 300;
};

struct IdentityReport {
  bool ok = false;
  Rational horizon;
  std::size_t nonzero = 0;           // nonzero theta coefficients compared
  std::optional<Rational> firstDiff; // first differing exponent
  std::string thetaCoeff, identityCoeff;
  bool holomorphic = true;           // no w terms in the theta series
};

inline IdentityReport compare_identity(const WSeries &theta, const EtaExpr &rhs, const Rational &maxQ, bool almost) {
  IdentityReport rep;
  rep.horizon = maxQ;
  WSeries lhs = theta.truncated(maxQ);
  for (const auto &[k, c] : lhs.coeffs())
    if (c.degree() > 0) rep.holomorphic = false;
  if (!almost) lhs = to_w(w_part(lhs, 0));
  WSeries r = rhs.expand(maxQ);
  if (!almost && rhs.has_completion()) r = to_w(w_part(r, 0));
  rep.nonzero = lhs.size();
  rep.firstDiff = first_difference(lhs, r);
  if (rep.firstDiff) {
    rep.thetaCoeff = format_coeff(lhs.coefficient(*rep.firstDiff));
    rep.identityCoeff = format_coeff(r.coefficient(*rep.firstDiff));
  }
  rep.ok = !rep.firstDiff.has_value();
  return rep;
}

namespace examples_detail {

inline RationalVector rv(std::initializer_list<long long> xs) {
  RationalVector v;
  for (auto x : xs) v.push_back(make_rational(x));
  return v;
}

inline Polynomial poly(const std::string &s, std::size_t n = 3) { return parse_polynomial(s, n); }

inline PeriodicWeight kron(long long D, std::vector<IntVector> forms, std::size_t n) {
  std::vector<std::pair<long long, IntVector>> chars;
  for (auto &f : forms) chars.emplace_back(D, std::move(f));
  return PeriodicWeight::kronecker_product(n, chars);
}

inline Example ex41(bool b) {
  Example e;
  e.id = b ? "ex41b" : "ex41a";
  e.title = b ? "Q = v1^2 + 6 v1 v2 + v2^2, m = (-4/(v1+v2))" : "Q = v1^2 + 5 v1 v2 + v2^2, m = (-3/(v1+v2))";
  long long k = b ? 6 : 5;
  e.A = IMatrix{{2, k}, {k, 2}};
  e.c = b ? rv({-1, 3}) : rv({-2, 5});
  PeriodicWeight m = kron(b ? -4 : -3, {{1, 1}}, 2);
  e.terms.push_back(ThetaTerm{IMatrix{{k, 1}, {-1, 0}}, Polynomial::constant(2, 1), m});
  e.identity = b ? "4*e8*e16" : "4*e3*e21";
  e.spherical = true;
  return e;
}

inline Example ex284_base() {
  Example e;
  e.A = IMatrix{{2, 0, 0}, {0, 8, 0}, {0, 0, -4}};
  e.c = rv({0, 0, -1});
  return e;
}

inline const IMatrix &ex284_g1() {
  static const IMatrix g{{1, 0, 0}, {0, 3, 2}, {0, 4, 3}};
  return g;
}
inline const IMatrix &ex284_g2() {
  static const IMatrix g{{3, 0, 4}, {0, 1, 0}, {2, 0, 3}};
  return g;
}

inline Example ex284(const std::string &id, const std::string &f1, const std::string &f2, const std::string &identity,
                     int d, bool spherical) {
  Example e = ex284_base();
  e.id = id;
  e.title = "Q = v1^2 + 4 v2^2 - 2 v3^2, degree " + std::to_string(d);
  e.terms = {ThetaTerm{ex284_g1(), poly(f1), std::nullopt}, ThetaTerm{ex284_g2(), poly(f2), std::nullopt}};
  e.identity = identity;
  e.degree = d;
  e.spherical = spherical;
  return e;
}

struct Tab24Row {
  long long a, b, c;
  IMatrix g1, g2;
  const char *f1, *f2, *identity;
};

inline Example tab24(int row) {
  static const std::vector<Tab24Row> rows = {
      {1, 3, 2, {{1, 0, 0}, {0, 5, 4}, {0, 6, 5}}, {{3, 0, 4}, {0, 1, 0}, {2, 0, 3}}, "-3*v2+2*v3", "2*v1-2*v3",
       "e2^3*e4^2*e6*e24/(e8*e12)"},
      {1, 2, 3, {{1, 0, 0}, {0, 5, 6}, {0, 4, 5}}, {{2, 0, 3}, {0, 1, 0}, {1, 0, 2}}, "-v2+v3", "v1-v3",
       "e1*e6^9*e8^2/(e2*e3^3*e12^3)"},
      {1, 6, 2, {{1, 0, 0}, {0, 2, 1}, {0, 3, 2}}, {{3, 0, 4}, {0, 1, 0}, {2, 0, 3}}, "-3*v2+v3", "v1-v3",
       "e2^2*e3*e4^3*e12/(e1*e6)"},
      {1, 2, 6, {{1, 0, 0}, {0, 2, 3}, {0, 1, 2}}, {{5, 0, 12}, {0, 1, 0}, {2, 0, 5}}, "-2*v2+2*v3", "v1-2*v3",
       "e1^2*e8*e12^9/(e4*e6^3*e24^3)"},
      {1, 6, 3, {{1, 0, 0}, {0, 3, 2}, {0, 4, 3}}, {{2, 0, 3}, {0, 1, 0}, {1, 0, 2}}, "-2*v2+v3", "v1-v3",
       "e2*e6^3*e8*e12^2/(e4*e24)"},
      {3, 6, 1, {{1, 0, 0}, {0, 5, 2}, {0, 12, 5}}, {{2, 0, 1}, {0, 1, 0}, {3, 0, 2}}, "-3*v2+v3", "3*v1-v3",
       "e2^9*e3*e24^2/(e1^3*e4^3*e6)"},
      {2, 6, 3, {{1, 0, 0}, {0, 3, 2}, {0, 4, 3}}, {{5, 0, 6}, {0, 1, 0}, {4, 0, 5}}, "-2*v2+v3", "v1-v3",
       "e1*e4*e6^2*e12^3/(e2*e3)"},
      {3, 6, 2, {{1, 0, 0}, {0, 2, 1}, {0, 3, 2}}, {{5, 0, 4}, {0, 1, 0}, {6, 0, 5}}, "-6*v2+2*v3", "3*v1-2*v3",
       "e3^2*e4^9*e24/(e2^3*e8^3*e12)"},
  };
  const auto &r = rows.at(row - 1);
  Example e;
  e.id = "tab24-" + std::to_string(row);
  e.title = "level 24 form " + std::to_string(r.a) + " v1^2 + " + std::to_string(r.b) + " v2^2 - " + std::to_string(r.c) + " v3^2";
  e.A = IMatrix{{2 * r.a, 0, 0}, {0, 2 * r.b, 0}, {0, 0, -2 * r.c}};
  e.c = rv({0, 0, -1});
  e.terms = {ThetaTerm{r.g1, poly(r.f1), std::nullopt}, ThetaTerm{r.g2, poly(r.f2), std::nullopt}};
  e.prefactor = Rational(1, 4);
  e.identity = r.identity;
  e.degree = 1;
  e.spherical = true;
  return e;
}

inline Example ex2N(long long N, bool d3) {
  PellSolution p = pell_solve(2 * N);
  long long x = to_ll(p.x), y = to_ll(p.y);
  Example e;
  e.id = d3 ? "ex2N-d3" : "ex2N-" + std::to_string(N);
  e.title = "Q = v1^2 + v2^2 - " + std::to_string(N) + " v3^2 with (-4/v1)(-4/v2), (x,y) = (" + std::to_string(x) + "," +
            std::to_string(y) + ")";
  e.A = IMatrix{{2, 0, 0}, {0, 2, 0}, {0, 0, -2 * N}};
  e.c = rv({0, 0, -1});
  PeriodicWeight m = kron(-4, {{1, 0, 0}, {0, 1, 0}}, 3);
  IMatrix g1{{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, g2{{1, 0, 0}, {0, -1, 0}, {0, 0, 1}};
  IMatrix g3{{(x + 1) / 2, (x - 1) / 2, N * y}, {(x - 1) / 2, (x + 1) / 2, N * y}, {y, y, x}};
  Polynomial f1, f2, f3;
  if (d3) {
    f1 = poly("7*(v2+v3)^3");
    f2 = poly("7*(v1+v3)^3");
    f3 = poly("4*v1^3+4*v2^3+3*(v1+v2)*v3^2-9*v1*v2*(v1+v2)");
  } else {
    f1 = Polynomial::linear({0, make_rational(y, 2), make_rational(x - 1, 4)});
    f2 = Polynomial::linear({make_rational(y, 2), 0, make_rational(x - 1, 4)});
    f3 = poly("v3");
  }
  e.terms = {ThetaTerm{g1, f1, m}, ThetaTerm{g2, f2, m}, ThetaTerm{g3, f3, m}};
  static const std::map<long long, std::string> ids = {
      {1, "4*e2^5*e8^2/e1^2"},
      {3, "8*e8^4*e24^9/(e4*e12^3*e16*e48^3) - 32*e8*e16*e48^3"},
      {4, "4*e4^2*e8*e16^2"},
      {6, "8*e2*e8^4*e12^2/(e4*e6)"},
  };
  e.identity = d3 ? "48*e2^5*e8^2/e1^2*(G2[1] - 5*G2[2] + 12*G2[8])" : ids.at(N);
  e.degree = d3 ? 3 : 1;
  e.spherical = true;
  return e;
}

/// h^r_i Q^r of the level 4N family; i = 1 or 2.
inline Polynomial exN_f(int i, int d, int r, long long N, const Rational &alpha, const Rational &beta) {
  auto lin = [](const Rational &a, const Rational &b, const Rational &c) { return Polynomial::linear({a, b, c}); };
  int e = d - 2 * r;
  Polynomial h(3);
  if (i == 1) {
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) h += lin(alpha * s1, alpha * s2, beta).pow(e);
    h *= Rational(1, 4);
  } else {
    h += lin(alpha, alpha, -beta).pow(e);
    h += lin(-alpha, alpha, -beta).pow(e);
    h *= Rational(1, 2);
  }
  Polynomial Q = poly("v1^2+v2^2") - poly("v3^2") * make_rational(N);
  return h * Q.pow(r);
}

inline Rational factorial(int n) {
  Rational f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

/// Spherical combination sum_r (beta^2/N - 2 alpha^2)^r (2(d-r))!/(r!(d-r)!(d-2r)!) f^r_i,
/// divided by the gcd of the (integer) combination coefficients.
inline std::vector<Rational> exN_spherical_coefficients(int d, long long N, const Rational &alpha, const Rational &beta) {
  std::vector<Rational> coef;
  Rational base = beta * beta / make_rational(N) - 2 * alpha * alpha;
  Rational pw = 1;
  for (int r = 0; 2 * r <= d - 1; ++r) {
    coef.push_back(pw * factorial(2 * (d - r)) / (factorial(r) * factorial(d - r) * factorial(d - 2 * r)));
    pw *= base;
  }
  Integer g = 0;
  bool integral = true;
  for (const auto &c : coef) {
    if (c.get_den() != 1) integral = false;
    else mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_num_mpz_t());
  }
  if (integral && g > 1)
    for (auto &c : coef) c /= Rational(g);
  return coef;
}

inline Example exN(long long N, const std::string &variant) {
  PellSolution p = pell_solve(N, true);
  long long x = to_ll(p.x), y = to_ll(p.y);
  long long g = std::gcd(x - 1, y);
  Rational alpha = make_rational(y / g), beta = make_rational((x - 1) / g);
  Example e;
  e.id = "exN-" + std::to_string(N) + "-" + variant;
  e.title = "Q = v1^2 + v2^2 - " + std::to_string(N) + " v3^2, period-2 weight, (x,y) = (" + std::to_string(x) + "," +
            std::to_string(y) + "), " + variant;
  e.A = IMatrix{{2, 0, 0}, {0, 2, 0}, {0, 0, -2 * N}};
  e.c = rv({0, 0, -1});
  PeriodicWeight m = PeriodicWeight::from_function(2, 3, [](const IntVector &v) {
    if ((v[0] - v[1]) % 2 == 0) return Cyclotomic(0);
    return Cyclotomic(v[1] % 2 ? -1 : 1);
  });
  IMatrix g1{{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}, g2{{1, 0, 0}, {0, x, N * y}, {0, y, x}};
  int d = variant == "d1" ? 1 : 3;
  Polynomial f1(3), f2(3);
  if (variant == "d1" || variant == "d3-r0" || variant == "d3-r1") {
    int r = variant == "d3-r1" ? 1 : 0;
    f1 = exN_f(1, d, r, N, alpha, beta);
    f2 = exN_f(2, d, r, N, alpha, beta);
  } else {
    auto coef = exN_spherical_coefficients(d, N, alpha, beta);
    for (int r = 0; r < static_cast<int>(coef.size()); ++r) {
      f1 += exN_f(1, d, r, N, alpha, beta) * coef[r];
      f2 += exN_f(2, d, r, N, alpha, beta) * coef[r];
    }
  }
  e.terms = {ThetaTerm{g1, f1, m}, ThetaTerm{g2, f2, m}};
  e.degree = d;
  e.spherical = variant == "d1" || variant == "d3-sph";
  e.almost = variant == "d3-r0" || variant == "d3-r1";
  const std::string p2 = "e2^2*e4*e8^2", p3 = "e1*e4^4*e6^2/(e2*e3)";
  if (N == 2) {
    if (variant == "d1") e.identity = "-4*" + p2;
    if (variant == "d3-r0") e.identity = "24*" + p2 + "*(G2s[2] - G2s[4] + 4*G2s[8])";
    if (variant == "d3-r1") e.identity = "16*" + p2 + "*(G2s[2] + G2s[4] + 4*G2s[8])";
    if (variant == "d3-sph") e.identity = "96*" + p2 + "*(G2[2] - 4*G2[4] + 4*G2[8])";
  } else {
    if (variant == "d1") e.identity = "-8*" + p3;
    if (variant == "d3-r0") e.identity = "24*" + p3 + "*(3*G2s[1] - 6*G2s[2] - 9*G2s[3] + 8*G2s[4] + 36*G2s[6])";
    if (variant == "d3-r1") e.identity = "8*" + p3 + "*(G2s[1] - 2*G2s[2] - 3*G2s[3] + 16*G2s[4] + 12*G2s[6])";
    if (variant == "d3-sph") e.identity = "48*" + p3 + "*(G2[1] - 2*G2[2] - 3*G2[3] - 4*G2[4] + 12*G2[6])";
  }
  return e;
}

} // namespace examples_detail

inline const std::vector<std::string> &example_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v = {"ex41a", "ex41b", "ex284-d1", "ex284-d3-1", "ex284-d3-2", "ex284-d3-3", "ex284-sph-1",
                                  "ex284-sph-2"};
    for (int r = 1; r <= 8; ++r) v.push_back("tab24-" + std::to_string(r));
    for (int N : {1, 3, 4, 6}) v.push_back("ex2N-" + std::to_string(N));
    v.push_back("ex2N-d3");
    for (int N : {2, 3})
      for (const char *s : {"d1", "d3-r0", "d3-r1", "d3-sph"}) v.push_back("exN-" + std::to_string(N) + "-" + s);
    return v;
  }();
  return ids;
}

namespace examples_detail {

inline Example build_example(const std::string &id) {
  const std::string eta5 = "e2^2*e4*e8^2", corr = "4*e8^2*e16^4/e4^2";
  if (id == "ex41a") return ex41(false);
  if (id == "ex41b") return ex41(true);
  if (id == "ex284-d1") return ex284(id, "-2*v2+v3", "v1-v3", "4*" + eta5, 1, true);
  if (id == "ex284-d3-1")
    return ex284(id, "1/2*v1^2*(-2*v2+v3)", "1/14*v1*(3*v1-4*v3)*(v1-v3)",
                 "8/7*" + eta5 + "*(G2[1] - 5*G2[2] + 10*G2[8] - 24*G2[16] + " + corr + ")", 3, false);
  if (id == "ex284-d3-2")
    return ex284(id, "1/14*v2*(3*v2-2*v3)*(-2*v2+v3)", "1/2*v2^2*(v1-v3)",
                 "-2/7*" + eta5 + "*(G2[1] - G2[2] - 2*G2[4] + 26*G2[8] - 24*G2[16] + " + corr + ")", 3, false);
  if (id == "ex284-d3-3")
    return ex284(id, "-1/14*(8*v2^2+4*v2*v3-7*v3^2)*(-2*v2+v3)", "-1/14*(2*v1^2+2*v1*v3-7*v3^2)*(v1-v3)",
                 "12/7*" + eta5 + "*(G2[2] + 3*G2[4] + 4*G2[8])", 3, false);
  if (id == "ex284-sph-1")
    return ex284(id, "1/14*(7*v1^2-12*v2^2+8*v2*v3)*(-2*v2+v3)", "1/14*(3*v1^2-4*v1*v3-28*v2^2)*(v1-v3)",
                 "16/7*" + eta5 + "*(G2[1] - 3*G2[2] - G2[4] + 18*G2[8] - 24*G2[16] + " + corr + ")", 3, true);
  if (id == "ex284-sph-2")
    return ex284(id, "1/14*(21*v1^2+4*v2^2-40*v2*v3+28*v3^2)*(-2*v2+v3)",
                 "1/14*(v1^2+84*v2^2+28*v3^2-20*v1*v3)*(v1-v3)", "-48/7*" + eta5 + "*(G2[2] - 4*G2[4] + 4*G2[8])", 3,
                 true);
  if (id.rfind("tab24-", 0) == 0 && id.size() == 7 && id[6] >= '1' && id[6] <= '8') return tab24(id[6] - '0');
  if (id == "ex2N-1") return ex2N(1, false);
  if (id == "ex2N-3") return ex2N(3, false);
  if (id == "ex2N-4") return ex2N(4, false);
  if (id == "ex2N-6") return ex2N(6, false);
  if (id == "ex2N-d3") return ex2N(1, true);
  for (int N : {2, 3})
    for (const char *s : {"d1", "d3-r0", "d3-r1", "d3-sph"})
      if (id == "exN-" + std::to_string(N) + "-" + s) return exN(N, s);
  fail(ErrorCode::UnknownExample, "unknown example id '" + id + "'");
}

// smallest multiple of 100 (>= 300) giving at least 200 nonzero compared coefficients
inline long default_max_q(const std::string &id) {
  static const std::map<std::string, long> table = {
      {"ex41a", 2700},      {"ex41b", 3900},       {"ex284-d1", 500},     {"ex284-d3-3", 400},  {"ex284-sph-2", 400},
      {"tab24-1", 500},     {"tab24-3", 500},      {"tab24-5", 700},      {"tab24-6", 400},     {"tab24-7", 700},
      {"tab24-8", 400},     {"ex2N-1", 600},       {"ex2N-3", 700},       {"ex2N-4", 900},      {"ex2N-6", 1000},
      {"ex2N-d3", 600},     {"exN-2-d1", 500},     {"exN-2-d3-r0", 400},  {"exN-2-d3-r1", 500}, {"exN-2-d3-sph", 400},
      {"exN-3-d1", 500},    {"exN-3-d3-r0", 500},  {"exN-3-d3-r1", 500},  {"exN-3-d3-sph", 500},
  };
  auto it = table.find(id);
  return it == table.end() ? 300 : it->second;
}

} // namespace examples_detail

inline Example get_example(const std::string &id) {
  Example e = examples_detail::build_example(id);
  e.maxQ = examples_detail::default_max_q(id);
  return e;
}

inline ThetaFamily example_family(const Example &e, const Rational &maxQ, const std::optional<RationalVector> &c = {}) {
  QuadraticForm form = make_form(e.A);
  ConeVector cv = make_cone_vector(form, c ? *c : e.c, e.c);
  return ThetaFamily{form, cv, RationalVector(form.dim(), Rational(0)), e.terms, maxQ};
}

/// Cone vectors 3c + e_j (and 3c - e_j) that stay negative and in the component of c.
inline std::vector<RationalVector> alternate_cones(const Example &e, std::size_t count) {
  QuadraticForm form = make_form(e.A);
  std::vector<RationalVector> out;
  for (long long k = 3; out.size() < count && k < 20; ++k)
    for (std::size_t j = 0; j < e.c.size() && out.size() < count; ++j)
      for (int s : {1, -1}) {
        RationalVector c = e.c;
        for (auto &x : c) x *= make_rational(k);
        c[j] += s;
        if (eval_Q(form, c) >= 0 || eval_B(form, c, e.c) >= 0) continue;
        out.push_back(c);
        if (out.size() == count) break;
      }
  return out;
}

/// Runs the example: condition check, exact expansion, identity comparison.
inline IdentityReport run_example(const Example &e, const Rational &maxQ, const std::optional<RationalVector> &c = {}) {
  WSeries theta = theta_sum(example_family(e, maxQ, c)).scaled(WPoly(e.prefactor));
  return compare_identity(theta, parse_eta_expr(e.identity), maxQ, e.almost);
}

} // namespace indef_theta
