// Acceptance gate: one PASS/FAIL line per criterion, details on indented lines.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <iomanip>
#include <sstream>

#include "indef_theta/examples.hpp"
#include "indef_theta/numeric.hpp"
#include "lattice_oracle.hpp"

using namespace indef_theta;
using examples_detail::rv;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool ok = true;
  std::ostringstream details;  // summary shown on the criterion line
  void require(bool cond, const std::string &what) {
    if (!cond) {
      if (ok) details << "first failure: " << what << "; ";
      ok = false;
      std::cout << "    failed: " << what << "\n";
    }
  }
};

bool report(int number, const std::string &name, const std::function<void(Outcome &)> &body) {
  Outcome out;
  auto t0 = Clock::now();
  try {
    body(out);
  } catch (const std::exception &e) {
    out.ok = false;
    out.details << "exception: " << e.what() << "; ";
  }
  std::cout << "CRITERION " << number << " " << name << ": " << (out.ok ? "PASS" : "FAIL") << " (" << out.details.str()
            << std::fixed << std::setprecision(1) << seconds_since(t0) << " s)" << std::endl;
  return out.ok;
}

Polynomial random_homogeneous(std::mt19937 &rng, std::size_t n, int d, const MonomialPredicate &pred = all_monomials()) {
  std::uniform_int_distribution<int> coef(-9, 9), den(1, 4);
  Polynomial p(n);
  for (const auto &m : monomial_basis(n, d, pred))
    if (rng() % 3 != 0) p.add_term(m, make_rational(coef(rng), den(rng)));
  return p;
}

RationalVector random_cone(std::mt19937 &rng, const QuadraticForm &form, const RationalVector &c0) {
  std::uniform_int_distribution<int> d(-2, 2);
  while (true) {
    RationalVector c = c0;
    for (auto &x : c) x = x * 4 + d(rng);
    if (eval_Q(form, c) < 0 && eval_B(form, c, c0) < 0) return c;
  }
}

ThetaSpec make_spec(const QuadraticForm &form, const RationalVector &c1, const RationalVector &c2, const Polynomial &f,
                    const RationalVector &c0, const Rational &maxQ) {
  return ThetaSpec{form, make_cone_vector(form, c1, c0), make_cone_vector(form, c2, c0), f,
                   RationalVector(form.dim(), Rational(0)), std::nullopt, maxQ};
}

struct FormCase {
  IMatrix A;
  RationalVector c0;
};

std::vector<FormCase> sample_forms() {
  return {{IMatrix{{2, 0, 0}, {0, 8, 0}, {0, 0, -4}}, rv({0, 0, -1})},
          {IMatrix{{2, 5}, {5, 2}}, rv({-2, 5})},
          {IMatrix{{2, 1, 0}, {1, 4, 0}, {0, 0, -6}}, rv({0, 0, -1})},
          {IMatrix{{2, 0, 0}, {0, 6, 0}, {0, 0, -4}}, rv({0, 0, -1})}};
}

// first term whose g c is independent of c, without its periodic weight
std::optional<ThetaSpec> unweighted_term(const ThetaFamily &fam) {
  for (const auto &t : fam.terms) {
    RationalVector gc = t.g.cast<Rational>() * fam.c.c;
    if (linearly_dependent(gc, fam.c.c)) continue;
    return ThetaSpec{fam.form, fam.c, make_cone_vector(fam.form, gc, fam.c.c), t.f, fam.lambda, std::nullopt, fam.maxQ};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

void criterion1(Outcome &out) {
  double worst = 0;
  std::size_t passed = 0, minNonzero = 1u << 30;
  for (const auto &id : example_ids()) {
    Example e = get_example(id);
    auto t0 = Clock::now();
    IdentityReport at300 = run_example(e, 300);
    double dt = seconds_since(t0);
    worst = std::max(worst, dt);
    IdentityReport full = run_example(e, e.maxQ);
    bool ok = at300.ok && full.ok && dt <= 60 && full.nonzero >= 200;
    if (e.spherical) ok = ok && full.holomorphic;
    minNonzero = std::min(minNonzero, full.nonzero);
    std::cout << "    " << id << ": maxQ 300 " << (at300.ok ? "equal" : "DIFFERENT") << " in " << std::fixed
              << std::setprecision(2) << dt << " s; maxQ " << e.maxQ.get_str() << " "
              << (full.ok ? "equal" : "DIFFERENT") << " over " << full.nonzero << " nonzero coefficients\n";
    out.require(ok, id);
    passed += ok;
  }
  out.details << passed << "/" << example_ids().size() << " identities, slowest at maxQ 300 " << std::fixed
              << std::setprecision(2) << worst << " s, at least " << minNonzero << " nonzero coefficients compared; ";
}

void criterion2(Outcome &out) {
  std::mt19937 rng(17);
  auto forms = sample_forms();
  // w^0 projection
  int projections = 0;
  for (int t = 0; t < 20; ++t) {
    const auto &fc = forms[t % forms.size()];
    QuadraticForm form = make_form(fc.A);
    auto c1 = random_cone(rng, form, fc.c0), c2 = random_cone(rng, form, fc.c0);
    if (linearly_dependent(c1, c2)) continue;
    Polynomial f = random_homogeneous(rng, form.dim(), 1 + t % 5);
    auto s = make_spec(form, c1, c2, f, fc.c0, 40);
    out.require(w_part(theta_almost(s), 0) == theta_holomorphic(s), "w^0 projection, spec " + std::to_string(t));
    ++projections;
  }
  out.require(projections >= 18, "too few projection specs");
  // telescoping, antisymmetry, even-degree vanishing
  for (int t = 0; t < 12; ++t) {
    const auto &fc = forms[t % forms.size()];
    QuadraticForm form = make_form(fc.A);
    auto c1 = random_cone(rng, form, fc.c0), c2 = random_cone(rng, form, fc.c0), c3 = random_cone(rng, form, fc.c0);
    if (linearly_dependent(c1, c2) || linearly_dependent(c2, c3) || linearly_dependent(c1, c3)) continue;
    Polynomial f = random_homogeneous(rng, form.dim(), 1 + 2 * (t % 2));
    auto t12 = theta_almost(make_spec(form, c1, c2, f, fc.c0, 40));
    auto t23 = theta_almost(make_spec(form, c2, c3, f, fc.c0, 40));
    auto t13 = theta_almost(make_spec(form, c1, c3, f, fc.c0, 40));
    auto t21 = theta_almost(make_spec(form, c2, c1, f, fc.c0, 40));
    out.require(t12 + t23 == t13, "telescoping " + std::to_string(t));
    out.require(t21 == t12.scaled(-1), "antisymmetry " + std::to_string(t));
    Polynomial even = random_homogeneous(rng, form.dim(), 2 * (t % 3));
    if (!even.is_zero())
      out.require(theta_almost(make_spec(form, c1, c2, even, fc.c0, 40)).empty(), "even degree " + std::to_string(t));
  }
  // cone-vector independence
  int alternates = 0;
  for (const auto &id : example_ids()) {
    Example e = get_example(id);
    auto base = theta_sum(example_family(e, 80));
    auto cones = alternate_cones(e, 2);
    out.require(cones.size() == 2, id + ": alternate cones");
    for (const auto &c : cones) {
      out.require(theta_sum(example_family(e, 80, c)) == base, id + ": depends on c");
      ++alternates;
    }
  }
  // Psi_g round trips
  QuadraticForm f43 = make_form(IMatrix{{2, 0, 0}, {0, 8, 0}, {0, 0, -4}});
  const IMatrix g1{{1, 0, 0}, {0, 3, 2}, {0, 4, 3}}, g2{{3, 0, 4}, {0, 1, 0}, {2, 0, 3}};
  auto even1 = parity_predicate({0, -1, -1}), even2 = parity_predicate({-1, 0, -1});
  auto P = [](const char *s) { return parse_polynomial(s, 3); };
  out.require(psi_invert(P("v1^2*v3"), g1, even1) == P("1/2*v1^2*(-2*v2+v3)"), "table entry v1^2 v3");
  out.require(psi_invert(P("v2^2*v3"), g1, even1) == P("1/14*v2*(3*v2-2*v3)*(-2*v2+v3)"), "table entry v2^2 v3");
  out.require(psi_invert(P("-v3^3"), g2, even2) == P("-1/14*(2*v1^2+2*v1*v3-7*v3^2)*(v1-v3)"), "table entry -v3^3");
  const IMatrix g3{{1, 0, 0}, {0, 5, 4}, {0, 6, 5}}, g4{{5, 0, 12}, {0, 1, 0}, {2, 0, 5}};
  std::vector<std::pair<IMatrix, MonomialPredicate>> cases = {{g1, even1}, {g2, even2}, {g3, even1}, {g4, even2}};
  int rounds = 0;
  for (int t = 0; rounds < 50 && t < 80; ++t) {
    auto &[g, pred] = cases[t % cases.size()];
    Polynomial f = random_homogeneous(rng, 3, 1 + 2 * (t % 4), pred);
    if (f.is_zero()) continue;
    Polynomial back = psi_invert(psi_apply(f, g), g, pred);
    out.require(back == f, "Psi round trip " + std::to_string(t));
    out.require(psi_apply(back, g) == psi_apply(f, g), "Psi image " + std::to_string(t));
    ++rounds;
  }
  out.require(rounds == 50, "50 random Psi pairs");
  // spherical kernel dimensions, parity space odd in v3
  auto V = parity_predicate({0, 0, -1});
  for (int d : {1, 3, 5, 7})
    out.require(spherical_kernel(f43, d, V).size() == static_cast<std::size_t>((d + 1) / 2),
                "spherical kernel dimension d = " + std::to_string(d));
  out.details << projections << " projections, " << alternates << " alternate cones, " << rounds << " Psi pairs; ";
}

void criterion3(Outcome &out) {
  std::mt19937 rng(23);
  std::vector<QuadraticForm> forms = {make_form(IMatrix{{2, 0, 0}, {0, 8, 0}, {0, 0, -4}}),
                                      make_form(IMatrix{{2, 1, 0, 0}, {1, 2, 0, 0}, {0, 0, 4, 1}, {0, 0, 1, -2}}),
                                      make_form(IMatrix{{2, 5}, {5, 2}})};
  int checks = 0;
  for (const auto &form : forms) {
    RationalVector c(form.dim());
    std::uniform_int_distribution<int> ci(-3, 3);
    for (auto &x : c) x = make_rational(ci(rng), 2);
    for (int d = 0; d <= 8; ++d) {
      AlmostPolynomial h = hat(form, random_homogeneous(rng, form.dim(), d));
      out.require(vigneras_operator(form, h) == h.scaled(d), "D f^ = d f^ at degree " + std::to_string(d));
      ++checks;
      for (int k = 0; k <= d; ++k) {
        AlmostPolynomial lhs = vigneras_operator(form, dir_deriv(c, h, k)) - dir_deriv(c, vigneras_operator(form, h), k);
        out.require(lhs == dir_deriv(c, h, k).scaled(-k), "[D, d_c^k] at degree " + std::to_string(d));
        ++checks;
      }
    }
  }
  out.details << checks << " exact identities; ";
}

void criterion4(Outcome &out) {
  std::set<std::vector<long long>> seen;
  std::mt19937_64 rng(4);
  double worst = 0;
  int forms = 0, checks = 0;
  auto t0 = Clock::now();
  for (const auto &id : example_ids()) {
    Example e = get_example(id);
    std::vector<long long> key;
    for (std::size_t i = 0; i < e.A.rows(); ++i)
      for (std::size_t j = 0; j < e.A.cols(); ++j) key.push_back(e.A(i, j));
    if (!seen.insert(key).second) continue;
    auto spec = unweighted_term(example_family(e, 40));
    if (!spec) {
      out.require(false, id + ": no term with g c independent of c");
      continue;
    }
    auto tf = Clock::now();
    double formWorst = 0;
    long long N = spec->form.level();
    for (int a = 0; a < 3; ++a) {
      UpperHalfPoint tau = random_tau(rng);
      for (int b = 0; b < 25; ++b) {
        auto r = check_gamma_transform(*spec, random_gamma0(N, rng), tau, 1e-6);
        formWorst = std::max(formWorst, r.residual);
        out.require(r.passed(), r.line());
        ++checks;
      }
    }
    ++forms;
    worst = std::max(worst, formWorst);
    std::cout << "    form of " << id << " (level " << N << "): 75 checks, max residual " << std::scientific
              << std::setprecision(2) << formWorst << std::defaultfloat << ", " << std::fixed << std::setprecision(1)
              << seconds_since(tf) << " s\n";
  }
  double total = seconds_since(t0);
  out.require(total <= 300, "runtime above 5 minutes");
  out.details << forms << " forms, " << checks << " checks, max residual " << std::scientific << std::setprecision(2)
              << worst << std::defaultfloat << "; ";
}

void criterion5(Outcome &out) {
  const std::vector<UpperHalfPoint> taus = {UpperHalfPoint(0, 1), UpperHalfPoint(0.3, 0.8), UpperHalfPoint(-0.41, 0.57)};
  double worst = 0;
  for (const auto &id : example_ids()) {
    auto fam = example_family(get_example(id), 40);
    for (const auto &tau : taus) {
      auto r = check_completion_equality(fam, tau, 1e-7, {}, id);
      worst = std::max(worst, r.residual);
      out.require(r.passed(), r.line());
    }
  }
  auto bad = example_family(get_example("ex284-d1"), 40);
  bad.terms.pop_back();
  auto neg = check_completion_equality(bad, UpperHalfPoint(0.3, 0.8), 1e-3, {}, "ex284-d1 without f2");
  out.require(neg.residual > 1e-3, "negative control too small: " + neg.line());
  std::cout << "    negative control: " << neg.line() << " (expected FAIL)\n";
  out.details << example_ids().size() * taus.size() << " samples, max difference " << std::scientific
              << std::setprecision(2) << worst << ", negative control " << neg.residual << std::defaultfloat << "; ";
}

void criterion6(Outcome &out) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-3, 3);
  struct Case {
    std::string name;
    IMatrix A;
    RationalVector c1, c2;
    Polynomial f;
  };
  std::vector<Case> cases;
  QuadraticForm f43 = make_form(IMatrix{{2, 0, 0}, {0, 8, 0}, {0, 0, -4}});
  cases.push_back({"d = 0", f43.matrix(), rv({0, 0, 1}), rv({0, 1, 2}), Polynomial::constant(3, 1)});
  for (const char *id : {"ex284-d1", "tab24-2", "ex284-d3-1", "exN-2-d3-r1"}) {
    Example e = get_example(id);
    for (const auto &t : e.terms)
      cases.push_back({id, e.A, e.c, t.g.cast<Rational>() * e.c, t.f});
  }
  double worst = 0;
  std::set<int> degrees;
  for (const auto &cs : cases) {
    QuadraticForm form = make_form(cs.A);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 20; ++i) {
      std::vector<double> v(form.dim());
      for (auto &x : v) x = u(rng);
      pts.push_back(v);
    }
    auto r = check_vigneras_ode(form, cs.c1, cs.c2, cs.f, pts, 1e-3, true);
    degrees.insert(cs.f.is_zero() ? 0 : cs.f.degree());
    worst = std::max(worst, r.maxRelError);
    out.require(r.maxRelError < 1e-4 && r.samples == 20, cs.name);
  }
  out.require(degrees == std::set<int>{0, 1, 3}, "degrees 0, 1, 3 covered");
  out.details << cases.size() << " kernels x 20 points, max relative residual " << std::scientific << std::setprecision(2)
              << worst << std::defaultfloat << "; ";
}

void criterion7(Outcome &out) {
  double worstSplit = 0;
  for (int i = -300; i <= 300; ++i) {
    if (i == 0) continue;
    double z = i * 0.01;
    double split = std::abs(E_func(z) - (z > 0 ? 1 : -1) * (1 - beta_func(z * z)));
    worstSplit = std::max(worstSplit, split);
  }
  out.require(worstSplit <= 1e-12, "E/beta split");
  for (int i = 0; i <= 1000; ++i) {
    double x = i * 0.01;
    out.require(beta_func(x) >= 0 && beta_func(x) <= std::exp(-std::numbers::pi * x) * (1 + 1e-15), "beta bound");
  }
  // E^(k) against central differences of E^(k-1): error ~ h^2
  double worstRatio = 4;
  for (int k = 1; k <= 6; ++k)
    for (double z : {-1.3, -0.4, 0.0, 0.55, 1.7}) {
      auto err = [&](double h) { return std::abs((E_deriv(k - 1, z + h) - E_deriv(k - 1, z - h)) / (2 * h) - E_deriv(k, z)); };
      double e1 = err(1e-2), e2 = err(5e-3);
      out.require(e1 <= 1e-4 * std::max(1.0, std::abs(E_deriv(k + 2, z))) * 100, "finite difference size");
      if (e1 > 1e-9) {
        out.require(std::abs(e1 / e2 - 4) < 0.2, "second order convergence");
        worstRatio = std::abs(e1 / e2 - 4) > std::abs(worstRatio - 4) ? e1 / e2 : worstRatio;
      }
    }
  out.details << "max split error " << std::scientific << std::setprecision(2) << worstSplit << std::defaultfloat
              << ", halving h divides the error by " << std::fixed << std::setprecision(3) << worstRatio
              << " (worst case); ";
}

void criterion8(Outcome &out) {
  std::mt19937 rng(8);
  std::size_t total = 0, most = 0;
  for (int t = 0; t < 50; ++t) {
    auto inst = oracle::random_instance(rng, 1 + t % 4, 1e5);
    auto pts = enumerate({PosDefForm{inst.G}, inst.shift, inst.bound});
    auto brute = oracle::brute_force(inst);
    bool same = pts.size() == brute.size() && std::set<RationalVector>(pts.begin(), pts.end()) == brute;
    out.require(same, "instance " + std::to_string(t));
    out.require(pts.size() <= 100000, "instance size " + std::to_string(t));
    total += pts.size();
    most = std::max(most, pts.size());
  }
  out.details << "50 instances, " << total << " points, largest " << most << "; ";
}

} // namespace

int main() {
  std::cout << "acceptance: " << worker_count() << " worker(s)" << std::endl;
  bool ok = true;
  ok &= report(1, "exact identity reproduction", criterion1);
  ok &= report(2, "structural properties", criterion2);
  ok &= report(3, "operator identities", criterion3);
  ok &= report(4, "numerical modularity", criterion4);
  ok &= report(5, "completion equality", criterion5);
  ok &= report(6, "differential equation", criterion6);
  ok &= report(7, "special functions", criterion7);
  ok &= report(8, "lattice enumeration", criterion8);
  std::cout << (ok ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL") << std::endl;
  return ok ? 0 : 1;
}
