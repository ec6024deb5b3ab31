#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "indef_theta/examples.hpp"
#include "indef_theta/numeric.hpp"

using namespace indef_theta;

namespace {

constexpr double kPi = std::numbers::pi;

RationalVector rv(std::initializer_list<long long> xs) {
  RationalVector v;
  for (auto x : xs) v.push_back(make_rational(x));
  return v;
}

// Adaptive Simpson in long double.
long double simpson(const std::function<long double(long double)> &f, long double a, long double b, long double eps,
                    int depth = 40) {
  auto s = [&](long double lo, long double hi) { return (hi - lo) / 6 * (f(lo) + 4 * f((lo + hi) / 2) + f(hi)); };
  std::function<long double(long double, long double, long double, long double, int)> rec =
      [&](long double lo, long double hi, long double whole, long double e, int d) -> long double {
    long double mid = (lo + hi) / 2, l = s(lo, mid), r = s(mid, hi);
    if (d <= 0 || std::fabs(l + r - whole) <= 15 * e) return l + r + (l + r - whole) / 15;
    return rec(lo, mid, l, e / 2, d - 1) + rec(mid, hi, r, e / 2, d - 1);
  };
  return rec(a, b, s(a, b), eps, depth);
}

std::vector<double> random_point(std::mt19937 &rng, std::size_t n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto &x : v) x = u(rng);
  return v;
}

ThetaSpec first_term_spec(const Example &e, const Rational &maxQ = 40) {
  auto fam = example_family(e, maxQ);
  for (const auto &t : fam.terms) {
    RationalVector gc = t.g.cast<Rational>() * fam.c.c;
    if (linearly_dependent(gc, fam.c.c)) continue;
    return ThetaSpec{fam.form, fam.c, make_cone_vector(fam.form, gc, fam.c.c), t.f, fam.lambda, {}, maxQ};
  }
  throw std::runtime_error("no usable term");
}

template <class F> ErrorCode code_of_error(F &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::ParseError;
}

const QuadraticForm &form284() {
  static const QuadraticForm f = make_form(IMatrix{{2, 0, 0}, {0, 8, 0}, {0, 0, -4}});
  return f;
}

} // namespace

// ---------------------------------------------------------------------------
// special functions

TEST(Special, EFunction) {
  EXPECT_EQ(E_func(0), 0.0);
  long double q = 2 * simpson([](long double u) { return std::exp(-static_cast<long double>(kPi) * u * u); }, 0, 1, 1e-18L);
  EXPECT_NEAR(E_func(1), static_cast<double>(q), 1e-14);
  EXPECT_NEAR(E_func(1), 0.987811117815197, 1e-12);
  double prev = -1;
  for (double z = -3; z <= 3; z += 0.01) {
    double e = E_func(z);
    EXPECT_NEAR(E_func(-z), -e, 1e-14);
    EXPECT_LT(std::abs(e), 1.0);
    EXPECT_GE(e, prev);
    prev = e;
  }
  for (double z : {0.3, -0.3, 1.0, -1.0, 2.5, -2.5}) {
    double sg = z > 0 ? 1 : -1;
    EXPECT_NEAR(E_func(z) - sg * (1 - beta_func(z * z)), 0, 1e-12) << z;
  }
}

TEST(Special, EDerivatives) {
  EXPECT_DOUBLE_EQ(E_deriv(1, 0), 2);
  EXPECT_NEAR(E_deriv(2, 0), 0, 1e-15);
  EXPECT_NEAR(E_deriv(3, 0), -4 * kPi, 1e-12);
  EXPECT_EQ(E_deriv(0, 0.7), E_func(0.7));
  for (double z = -2; z <= 2; z += 0.25) EXPECT_NEAR(E_deriv(1, z), 2 * std::exp(-kPi * z * z), 1e-15);
  // central differences: the error shrinks by ~4 when h halves
  for (int k = 1; k <= 6; ++k) {
    for (double z : {-1.3, -0.4, 0.0, 0.55, 1.7}) {
      auto err = [&](double h) { return std::abs((E_deriv(k - 1, z + h) - E_deriv(k - 1, z - h)) / (2 * h) - E_deriv(k, z)); };
      double e1 = err(1e-2), e2 = err(5e-3);
      EXPECT_LT(e1, 1e-2 * std::max(1.0, std::abs(E_deriv(k + 2, z))));
      if (e1 > 1e-9) {
        EXPECT_NEAR(e1 / e2, 4.0, 0.2) << k << " " << z;
      }
    }
  }
  EXPECT_THROW(E_deriv(-1, 0), Error);
}

TEST(Special, Beta) {
  EXPECT_DOUBLE_EQ(beta_func(0), 1);
  // u = 1 + s^2 removes nothing singular; integrand on [1, 1 + 40]
  long double q = simpson(
      [](long double u) { return std::exp(-static_cast<long double>(kPi) * u) / std::sqrt(u); }, 1, 41, 1e-20L);
  EXPECT_NEAR(beta_func(1), static_cast<double>(q), 1e-14);
  EXPECT_NEAR(beta_func(1), 0.0121888821848029, 1e-12);
  double prev = 2;
  for (double x = 0; x <= 10; x += 0.05) {
    double b = beta_func(x);
    EXPECT_GE(b, 0);
    EXPECT_LE(b, std::exp(-kPi * x) * (1 + 1e-15));
    EXPECT_LT(b, prev);
    prev = b;
  }
  EXPECT_EQ(code_of_error([] { beta_func(-0.1); }), ErrorCode::NegativeArgument);
}

// ---------------------------------------------------------------------------
// kernel

TEST(Kernel, DegreeZeroIsE) {
  const auto &form = form284();
  RationalVector c = rv({0, 1, 2});
  Polynomial one = Polynomial::constant(3, 1);
  double s = 1 / std::sqrt(-eval_Q(form, c).get_d());
  std::mt19937 rng(3);
  for (int i = 0; i < 20; ++i) {
    auto v = random_point(rng, 3, 2);
    double z = s * (8 * 1 * v[1] - 4 * 2 * v[2]);
    EXPECT_NEAR(p_kernel(form, c, one, v), E_func(z), 1e-14);
  }
}

TEST(Kernel, ParityAndAutomorphisms) {
  std::mt19937 rng(11);
  for (const auto &id : {"ex284-d1", "ex284-d3-1", "tab24-3", "ex2N-d3", "exN-2-d3-r1"}) {
    auto e = get_example(id);
    QuadraticForm form = make_form(e.A);
    for (const auto &t : e.terms) {
      int d = t.f.is_zero() ? 0 : t.f.degree();
      PKernel k(form, e.c, t.f);
      for (int i = 0; i < 10; ++i) {
        auto v = random_point(rng, form.dim(), 1.5);
        std::vector<double> mv(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) mv[j] = -v[j];
        double pv = k(v);
        EXPECT_NEAR(k(mv), (d % 2 ? 1 : -1) * pv, 1e-12 * std::max(1.0, std::abs(pv))) << id;
        // p^{gc}[f](gv) = p^c[f o g](v)
        RationalVector gc = t.g.cast<Rational>() * e.c;
        std::vector<double> gv(v.size(), 0.0);
        for (std::size_t a = 0; a < v.size(); ++a)
          for (std::size_t b = 0; b < v.size(); ++b) gv[a] += static_cast<double>(t.g(a, b)) * v[b];
        double lhs = PKernel(form, gc, t.f)(gv);
        double rhs = PKernel(form, e.c, compose(t.f, t.g))(v);
        EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs))) << id;
      }
    }
  }
}

TEST(Kernel, VignerasEquation) {
  std::mt19937 rng(5);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 20; ++i) pts.push_back(random_point(rng, 3, 3));
  pts.push_back({1, 0, 0});  // B(c1, v) = B(c2, v) = 0 for the pair below
  const auto &form = form284();
  RationalVector c1 = rv({0, 0, 1}), c2 = rv({0, 1, 2});
  auto r0 = check_vigneras_ode(form, c1, c2, Polynomial::constant(3, 1), pts);
  EXPECT_LT(r0.maxRelError, 1e-5);
  EXPECT_EQ(r0.samples, pts.size());
  for (const char *id : {"ex284-d1", "ex284-d3-2", "tab24-5"}) {
    auto e = get_example(id);
    QuadraticForm f = make_form(e.A);
    RationalVector gc = e.terms.back().g.cast<Rational>() * e.c;
    auto r = check_vigneras_ode(f, e.c, gc, e.terms.back().f, pts);
    EXPECT_LT(r.maxRelError, 1e-4) << id;
  }
  // scaling f scales p, so the absolute residual scales with it
  auto e = get_example("ex284-d1");
  RationalVector gc = e.terms[0].g.cast<Rational>() * e.c;
  auto a = check_vigneras_ode(form, e.c, gc, e.terms[0].f, pts, 1e-3, false);
  auto b = check_vigneras_ode(form, e.c, gc, e.terms[0].f * Rational(5), pts, 1e-3, false);
  EXPECT_GT(a.maxAbsError, 0);
  EXPECT_NEAR(b.maxAbsError / a.maxAbsError, 5.0, 1e-6);
  EXPECT_EQ(code_of_error([&] {
              check_vigneras_ode(form, c1, c2, Polynomial::constant(3, 1) + Polynomial::linear(rv({1, 0, 0})), pts);
            }),
            ErrorCode::NotHomogeneous);
}

// ---------------------------------------------------------------------------
// theta values

TEST(Numeric, TranslationAndIdentity) {
  auto s = first_term_spec(get_example("ex284-d1"));
  UpperHalfPoint tau(0.13, 1.7);
  EXPECT_TRUE(check_t_transform(s, tau, 1e-8).passed());
  auto id = check_gamma_transform(s, IMatrix{{1, 0}, {0, 1}}, tau, 1e-14);
  EXPECT_EQ(id.residual, 0.0);
  EXPECT_TRUE(check_gamma_transform(s, IMatrix{{1, 1}, {0, 1}}, tau, 1e-8).passed());
  auto r = check_gamma_transform(s, IMatrix{{1, 0}, {16, 1}}, tau, 1e-6);
  EXPECT_TRUE(r.passed()) << r.line();
  EXPECT_NE(r.line().find("[[1,0],[16,1]], 0.13+1.7i"), std::string::npos);
  EXPECT_THROW(check_gamma_transform(s, IMatrix{{1, 0}, {8, 1}}, UpperHalfPoint(0.1, 0.9), 1e-6), Error);
}

TEST(Numeric, RandomGammaOnSeveralForms) {
  std::mt19937_64 rng(2024);
  for (const char *id : {"ex41a", "ex284-d3-1", "tab24-2", "ex2N-3", "exN-3-d1"}) {
    auto e = get_example(id);
    auto s = first_term_spec(e);
    long long N = s.form.level();
    for (int i = 0; i < 3; ++i) {
      IMatrix g = random_gamma0(N, rng);
      EXPECT_EQ(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0), 1);
      EXPECT_EQ(g(1, 0) % N, 0);
      auto r = check_gamma_transform(s, g, UpperHalfPoint(0.05 * i - 0.07, 0.6 + 0.2 * i), 1e-6);
      EXPECT_TRUE(r.passed()) << id << " " << r.line();
    }
  }
}

TEST(Numeric, InversionWithCharacteristics) {
  auto e = get_example("ex284-d1");
  auto s = first_term_spec(e);
  UpperHalfPoint tau(0.1, 1.1);
  auto r = check_s_transform(s, tau, 1e-6);
  EXPECT_TRUE(r.passed()) << r.line();
  s.lambda = RationalVector{Rational(1, 2), Rational(1, 8), Rational(1, 4)};
  r = check_s_transform(s, tau, 1e-6);
  EXPECT_TRUE(r.passed()) << r.line();
  // d = 0 and d = 3 on the same form
  auto s0 = s;
  s0.f = Polynomial::constant(3, 1);
  s0.lambda = RationalVector(3, Rational(0));
  r = check_s_transform(s0, tau, 1e-6);
  EXPECT_TRUE(r.passed()) << r.line();
  auto s3 = first_term_spec(get_example("ex284-d3-1"));
  s3.lambda = RationalVector{Rational(0), Rational(3, 8), Rational(1, 4)};
  r = check_s_transform(s3, tau, 1e-6);
  EXPECT_TRUE(r.passed()) << r.line();
  // |det A| = 192 is beyond the harness
  QuadraticForm wide = make_form(IMatrix{{2, 0, 0}, {0, 24, 0}, {0, 0, -4}});
  ThetaSpec big{wide, make_cone_vector(wide, rv({0, 0, 1}), rv({0, 0, 1})), make_cone_vector(wide, rv({0, 1, 3}), rv({0, 0, 1})),
                Polynomial::constant(3, 1), RationalVector(3, Rational(0)), {}, 40};
  EXPECT_EQ(check_s_transform(big, tau, 1e-6).status, CheckReport::Status::Untested);
}

TEST(Numeric, Antisymmetry) {
  auto s = first_term_spec(get_example("ex284-d3-3"));
  auto swapped = s;
  std::swap(swapped.c1, swapped.c2);
  UpperHalfPoint tau(-0.2, 0.7);
  auto a = modtheta_eval(s, tau), b = modtheta_eval(swapped, tau);
  EXPECT_LT(std::abs(a.value + b.value), 1e-10);
  EXPECT_GT(std::abs(a.value), 1e-6);
}

TEST(Numeric, CompletionEquality) {
  auto e = get_example("ex284-d1");
  auto fam = example_family(e, 40);
  for (auto tau : {UpperHalfPoint(0, 1), UpperHalfPoint(0.3, 0.8), UpperHalfPoint(-0.41, 0.27)}) {
    auto r = check_completion_equality(fam, tau, 1e-7);
    EXPECT_TRUE(r.passed()) << r.line();
  }
  EXPECT_LT(check_completion_equality(fam, UpperHalfPoint(0.2, 10), 1e-10).residual, 1e-10);
  auto bad = fam;
  bad.terms.pop_back();
  auto neg = check_completion_equality(bad, UpperHalfPoint(0.3, 0.8), 1e-3);
  EXPECT_FALSE(neg.passed());
  EXPECT_GT(neg.residual, 1e-3);
  // almost holomorphic and twisted families
  for (const char *id : {"ex284-d3-2", "tab24-7", "exN-2-d3-r0"}) {
    auto f = example_family(get_example(id), 40);
    auto r = check_completion_equality(f, UpperHalfPoint(0.17, 0.9), 1e-7);
    EXPECT_TRUE(r.passed()) << id << " " << r.line();
  }
}

TEST(Numeric, MatchesEtaQuotient) {
  auto e = get_example("ex284-d1");
  auto fam = example_family(e, 40);
  auto num = modtheta_family(fam, UpperHalfPoint(0, 1));
  Complex eta = parse_eta_expr("4*e2^2*e4*e8^2").expand(make_rational(60)).evaluate(Complex(0, 1));
  EXPECT_LT(std::abs(num.value - eta), 1e-8);
  // spherical f: the completion is the holomorphic series itself
  auto sph = example_family(get_example("ex284-sph-1"), 40);
  UpperHalfPoint tau(0.21, 0.8);
  RationalSeries hol = theta_sum_holomorphic(ThetaFamily{sph.form, sph.c, sph.lambda, sph.terms, series_precision_for(tau.y)});
  EXPECT_LT(std::abs(modtheta_family(sph, tau).value - hol.evaluate(tau.tau())), 1e-8);
}

TEST(Numeric, ErrorEstimateIsHonest) {
  for (const char *id : {"ex41b", "ex284-d3-1", "tab24-4"}) {
    auto s = first_term_spec(get_example(id));
    UpperHalfPoint tau(0.11, 0.5);
    NumericConfig loose;
    loose.targetAbsTol = 1e-6;
    NumericConfig tight = loose;
    tight.targetAbsTol = 0.5e-6;
    auto a = modtheta_eval(s, tau, loose), b = modtheta_eval(s, tau, tight);
    EXPECT_LE(std::abs(a.value - b.value), a.errorEstimate) << id;
    EXPECT_LE(a.points, b.points);
    EXPECT_GT(a.errorEstimate, 0);
  }
}

TEST(Numeric, DeterministicAcrossWorkers) {
  auto s = first_term_spec(get_example("tab24-6"));
  UpperHalfPoint tau(0.3, 0.6);
  NumericConfig one, four;
  one.workers = 1;
  four.workers = 4;
  auto a = modtheta_eval(s, tau, one), b = modtheta_eval(s, tau, one), c = modtheta_eval(s, tau, four);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.value, c.value);  // blocks change, the reduction tree does not
  EXPECT_EQ(a.points, c.points);
}

TEST(Numeric, LimitsAndErrors) {
  auto s = first_term_spec(get_example("tab24-1"));
  NumericConfig cfg;
  cfg.maxPoints = 1000;
  try {
    modtheta_eval(s, UpperHalfPoint(0, 0.01), cfg);
    ADD_FAILURE() << "expected ToleranceUnreachable";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::ToleranceUnreachable);
  }
  EXPECT_THROW(UpperHalfPoint(0, 0), Error);
  EXPECT_THROW(UpperHalfPoint(0, -1), Error);
  auto w = s;
  w.lambda[0] = Rational(1, 2);
  EXPECT_THROW(check_gamma_transform(w, IMatrix{{1, 0}, {0, 1}}, UpperHalfPoint(0, 1), 1e-6), Error);
}

TEST(Numeric, VanishingTermsInFamilies) {
  // the first two terms of the level-4N family have g c proportional to c
  for (const char *id : {"ex2N-1", "ex2N-3", "ex2N-4", "ex2N-6"}) {
    auto e = get_example(id);
    auto fam = example_family(e, 60);
    ASSERT_GE(fam.terms.size(), 3u) << id;
    for (std::size_t i = 0; i < 2; ++i) {
      ThetaSpec s{fam.form, fam.c,
                  make_cone_vector(fam.form, fam.terms[i].g.cast<Rational>() * fam.c.c, fam.c.c),
                  fam.terms[i].f, fam.lambda, fam.terms[i].m, fam.maxQ};
      EXPECT_TRUE(theta_holomorphic(s).empty()) << id << " term " << i;
      EXPECT_EQ(modtheta_eval(s, UpperHalfPoint(0.1, 0.7)).value, Complex(0)) << id;
    }
  }
}
