#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "polynomial.hpp"
#include "qseries.hpp"
#include "weight.hpp"

namespace indef_theta {

/// One theta series: sum over l in lambda + Z^n of the sign factor of (c1, c2),
/// the weight m (evaluated at l - lambda), and f, truncated at q^maxQ.
struct ThetaSpec {
  QuadraticForm form;
  ConeVector c1, c2;
  Polynomial f;
  RationalVector lambda;
  std::optional<PeriodicWeight> m;
  Rational maxQ;
};

namespace detail {

inline void check_spec(const ThetaSpec &s) {
  std::size_t n = s.form.dim();
  if (s.c1.c.size() != n || s.c2.c.size() != n || s.lambda.size() != n || s.f.nvars() != n)
    fail(ErrorCode::DimensionMismatch, "theta spec dimensions disagree");
  if (!in_dual_lattice(s.form, s.lambda)) fail(ErrorCode::NotInDualLattice, "lambda is not in A^{-1} Z^n");
  if (!s.f.is_zero() && !s.f.is_homogeneous()) fail(ErrorCode::NotHomogeneous, "f must be homogeneous");
  if (s.m && s.m->dim() != n) fail(ErrorCode::DimensionMismatch, "weight dimension");
}

inline IntVector integer_part(const RationalVector &l, const RationalVector &lambda) {
  IntVector k(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) k[i] = to_ll(Rational(l[i] - lambda[i]).get_num());
  return k;
}

/// Calls visit(term, weight) for each support term with nonzero weight.
template <class Visit> void for_each_weighted_term(const ThetaSpec &s, Visit visit) {
  check_spec(s);
  for (const auto &t : support_terms(s.form, s.c1, s.c2, s.lambda, s.maxQ)) {
    Cyclotomic m = s.m ? (*s.m)(integer_part(t.point, s.lambda)) : Cyclotomic(1);
    if (m.is_zero()) continue;
    visit(t, m);
  }
}

inline Rational rational_weight(const Cyclotomic &m) {
  if (!m.is_rational()) fail(ErrorCode::RingMismatch, "weight has non-rational values; use the cyclotomic variant");
  return m.rational_part();
}

} // namespace detail

/// Holomorphic theta series with rational coefficients.
inline RationalSeries theta_holomorphic(const ThetaSpec &s) {
  RationalSeries out = RationalSeries::zero_through(s.maxQ);
  detail::for_each_weighted_term(s, [&](const SupportTerm &t, const Cyclotomic &m) {
    Rational c = make_rational(t.signFactor) * detail::rational_weight(m) * s.f.eval(t.point);
    out.add_term(t.qValue, c);
  });
  return out;
}

/// Holomorphic theta series with cyclotomic coefficients (twists, complex weights).
inline CycloSeries theta_holomorphic_cyclotomic(const ThetaSpec &s) {
  CycloSeries out = CycloSeries::zero_through(s.maxQ);
  detail::for_each_weighted_term(s, [&](const SupportTerm &t, const Cyclotomic &m) {
    Rational c = make_rational(t.signFactor) * s.f.eval(t.point);
    out.add_term(t.qValue, m * Cyclotomic(c));
  });
  return out;
}

/// Almost holomorphic theta series: coefficient of q^{Q(l)} collects
/// sum_k (-1)^k w^k / k! (Delta^k f)(l), with w standing for 1/(8 pi y).
inline WSeries theta_almost(const ThetaSpec &s) {
  AlmostPolynomial fh = hat(s.form, s.f.is_zero() ? Polynomial::constant(s.form.dim(), 0) : s.f);
  WSeries out = WSeries::zero_through(s.maxQ);
  detail::for_each_weighted_term(s, [&](const SupportTerm &t, const Cyclotomic &m) {
    Rational scale = make_rational(t.signFactor) * detail::rational_weight(m);
    std::vector<Rational> c;
    for (const auto &p : fh.parts()) c.push_back(scale * p.eval(t.point));
    out.add_term(t.qValue, WPoly(std::move(c)));
  });
  return out;
}

/// One summand of a compatible family: (g_i, f_i, m_i) with c2 = g_i c.
struct ThetaTerm {
  IMatrix g;
  Polynomial f;
  std::optional<PeriodicWeight> m;
};

struct ThetaFamily {
  QuadraticForm form;
  ConeVector c;
  RationalVector lambda;
  std::vector<ThetaTerm> terms;
  Rational maxQ;
};

struct ConditionReport {
  bool ok = true;
  std::string residual;       // offending residual, empty when ok
  IntVector residueClass;     // torus class of the failure (weighted check only)
};

/// Exact check of sum_i (m_i f_i - (m_i f_i) o g_i) = 0. Without weights this is the
/// polynomial identity; with weights it is checked class by class on (Z/L)^n, where
/// both m_i(l) and m_i(g_i l) are constant.
inline ConditionReport check_family_condition(const ThetaFamily &fam) {
  std::vector<Polynomial> fs;
  std::vector<IMatrix> gs;
  bool weighted = false;
  for (const auto &t : fam.terms) {
    fs.push_back(t.f);
    gs.push_back(t.g);
    weighted = weighted || t.m.has_value();
  }
  ConditionReport rep;
  if (!weighted) {
    Polynomial r = condition_residual(fs, gs);
    if (!r.is_zero()) {
      rep.ok = false;
      rep.residual = format_polynomial(r);
    }
    return rep;
  }
  std::size_t n = fam.form.dim();
  long long L = 1, order = 1;
  for (const auto &t : fam.terms)
    if (t.m) {
      L = std::lcm(L, t.m->period());
      order = std::lcm(order, t.m->value_order());
    }
  std::vector<Polynomial> composed;
  for (const auto &t : fam.terms) composed.push_back(compose(t.f, t.g));
  std::map<std::vector<std::string>, bool> seen;
  IntVector r(n, 0);
  while (true) {
    std::vector<Cyclotomic> a, b;
    std::vector<std::string> key;
    for (const auto &t : fam.terms) {
      Cyclotomic x = t.m ? (*t.m)(r) : Cyclotomic(1);
      IntVector gr(n, 0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) gr[i] += t.g(i, j) * r[j];
      Cyclotomic y = t.m ? (*t.m)(gr) : Cyclotomic(1);
      key.push_back(format_cyclotomic(x) + "|" + format_cyclotomic(y));
      a.push_back(x.lifted_to(order == 1 ? x.order() : order));
      b.push_back(y.lifted_to(order == 1 ? y.order() : order));
    }
    if (!seen.count(key)) {
      seen[key] = true;
      std::map<Monomial, Cyclotomic, GrlexDescending> res;
      auto add = [&](const Polynomial &p, const Cyclotomic &z, int sgn) {
        if (z.is_zero()) return;
        for (const auto &[mono, c] : p.terms()) res[mono] += z * Cyclotomic(Rational(sgn * c));
      };
      for (std::size_t i = 0; i < fam.terms.size(); ++i) {
        add(fs[i], a[i], 1);
        add(composed[i], b[i], -1);
      }
      std::string bad;
      for (const auto &[mono, z] : res)
        if (!z.is_zero()) {
          std::string mon;
          for (std::size_t i = 0; i < mono.size(); ++i)
            if (mono[i]) mon += "*v" + std::to_string(i + 1) + (mono[i] > 1 ? "^" + std::to_string(mono[i]) : "");
          bad += (bad.empty() ? "" : " + ") + std::string("(") + format_cyclotomic(z) + ")" + mon;
        }
      if (!bad.empty()) {
        rep.ok = false;
        rep.residual = bad;
        rep.residueClass = r;
        return rep;
      }
    }
    std::size_t i = 0;
    while (i < n && ++r[i] == L) r[i++] = 0;
    if (i == n) break;
  }
  return rep;
}

namespace detail {

inline void validate_family(const ThetaFamily &fam) {
  std::size_t n = fam.form.dim();
  for (const auto &t : fam.terms) {
    auto chk = is_automorphism(fam.form, t.g, fam.c);
    if (!chk) fail(ErrorCode::InvalidAutomorphism, chk.reason);
    RationalVector gl = t.g.cast<Rational>() * fam.lambda;
    for (std::size_t i = 0; i < n; ++i)
      if (Rational(gl[i] - fam.lambda[i]).get_den() != 1)
        fail(ErrorCode::ConditionViolated, "g does not fix the class of lambda");
  }
  auto rep = check_family_condition(fam);
  if (!rep.ok) {
    std::string where;
    if (!rep.residueClass.empty()) where = " on class (" + format_vector(to_rational(rep.residueClass)) + ")";
    fail(ErrorCode::ConditionViolated, "compatibility residual " + rep.residual + where);
  }
}

template <class Series, class One>
Series family_sum(const ThetaFamily &fam, One one) {
  Series out = Series::zero_through(fam.maxQ);
  for (const auto &t : fam.terms) {
    RationalVector gc = t.g.cast<Rational>() * fam.c.c;
    ConeVector c2 = make_cone_vector(fam.form, gc, fam.c.c);
    out += one(ThetaSpec{fam.form, fam.c, c2, t.f, fam.lambda, t.m, fam.maxQ});
  }
  return out;
}

} // namespace detail

/// Sum_i of the almost holomorphic series for (c, g_i c, f_i, m_i), after the exact
/// compatibility check. The result is the modular completion itself.
inline WSeries theta_sum(const ThetaFamily &fam) {
  detail::validate_family(fam);
  return detail::family_sum<WSeries>(fam, theta_almost);
}

/// Holomorphic counterpart of theta_sum (no condition check).
inline RationalSeries theta_sum_holomorphic(const ThetaFamily &fam) {
  return detail::family_sum<RationalSeries>(fam, theta_holomorphic);
}

/// Holomorphic family sum with cyclotomic weights, after the condition check.
inline CycloSeries theta_sum_cyclotomic(const ThetaFamily &fam) {
  detail::validate_family(fam);
  return detail::family_sum<CycloSeries>(fam, theta_holomorphic_cyclotomic);
}

struct SEntry {
  RationalVector mu;
  Cyclotomic coefficient;  // e^{2 pi i B(lambda, mu)} (-i)^{d+1}
  int detPowerTimesTwo;    // the coefficient is further multiplied by |det A|^{detPowerTimesTwo / 2}
};

struct CharacteristicData {
  Cyclotomic tMultiplier;  // e^{2 pi i Q(lambda)}
  std::vector<SEntry> sTable;
};

inline Cyclotomic exp_2pi_i(const Rational &x) {
  long long L = to_ll(x.get_den());
  long long k = to_ll(x.get_num());
  return L == 1 ? Cyclotomic(1) : Cyclotomic::root_of_unity(L, k);
}

/// Exact T and S multipliers of the characteristic theta series of degree d.
inline CharacteristicData theta_characteristic_transform_data(const QuadraticForm &form, const RationalVector &lambda, int d) {
  if (lambda.size() != form.dim()) fail(ErrorCode::DimensionMismatch, "lambda length");
  if (!in_dual_lattice(form, lambda)) fail(ErrorCode::NotInDualLattice, "lambda is not in A^{-1} Z^n");
  CharacteristicData out;
  out.tMultiplier = exp_2pi_i(eval_Q(form, lambda));
  Cyclotomic minus_i_pow = Cyclotomic::root_of_unity(4, -(d + 1));  // (-i)^{d+1}
  for (const auto &mu : dual_classes(form))
    out.sTable.push_back(SEntry{mu, exp_2pi_i(eval_B(form, lambda, mu)) * minus_i_pow, -1});
  return out;
}

} // namespace indef_theta
