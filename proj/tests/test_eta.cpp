#include <gtest/gtest.h>

#include "indef_theta/eta.hpp"

using namespace indef_theta;

namespace {

// prod_{n>=1} (1 - q^{Mn}) through exponent H by repeated multiplication, times q^{M/24}.
RationalSeries naive_eta(long long M, long long H) {
  RationalSeries p = RationalSeries::zero_through(make_rational(H));
  p.add_term(0, 1);
  for (long long n = 1; n * M <= H; ++n) {
    RationalSeries f;
    f.add_term(0, 1);
    f.add_term(make_rational(n * M), -1);
    p *= f;
  }
  RationalSeries lead;
  lead.add_term(make_rational(M, 24), 1);
  return (p * lead).truncated(make_rational(H));
}

long long sigma_naive(long long n) {
  long long s = 0;
  for (long long d = 1; d <= n; ++d)
    if (n % d == 0) s += d;
  return s;
}

EtaQuotient quotient(Rational scalar, std::map<long long, int> f) { return EtaQuotient{std::move(scalar), std::move(f)}; }

} // namespace

TEST(Eta, PentagonalCoefficients) {
  auto e = eta_expand(1, 400);
  EXPECT_EQ(e.denom(), 24);
  for (const auto &[k, c] : e.coeffs()) EXPECT_TRUE(c == 1 || c == -1);
  EXPECT_EQ(e.coefficient(Rational(1, 24)), 1);
  EXPECT_EQ(e.coefficient(Rational(1, 24) + 1), -1);
  EXPECT_EQ(e.coefficient(Rational(1, 24) + 2), -1);
  EXPECT_EQ(e.coefficient(Rational(1, 24) + 3), 0);
  EXPECT_EQ(e.coefficient(Rational(1, 24) + 5), 1);
  EXPECT_EQ(e.coefficient(Rational(1, 24) + 12), -1);
  EXPECT_EQ(*eta_expand(2, 5).valuation(), Rational(1, 12));
}

TEST(Eta, MatchesNaiveProduct) {
  for (long long M : {1, 2, 3, 7}) {
    auto e = eta_expand(M, 150);
    auto n = naive_eta(M, 150);
    EXPECT_EQ(e.horizon(), 150);
    EXPECT_TRUE(agree_to_shared_horizon(e, n)) << M;
    EXPECT_EQ(e.size(), n.size());
    EXPECT_TRUE(agree_to_shared_horizon(e, eta_expand(1, 150).substituted(M)));
  }
}

TEST(Eta, QuotientRecurrenceMatchesSeriesArithmetic) {
  const Rational H = 120;
  EXPECT_TRUE(agree_to_shared_horizon(quotient_expand(quotient(1, {{1, 1}}), H), eta_expand(1, H)));
  // 4 eta2^5 eta8^2 / eta^2
  auto rec = quotient_expand(quotient(4, {{2, 5}, {8, 2}, {1, -2}}), H);
  auto arith = (eta_expand(2, H + 5).pow(5) * eta_expand(8, H + 5).pow(2) / eta_expand(1, H + 5).pow(2)).scaled(4);
  EXPECT_TRUE(agree_to_shared_horizon(rec, arith));
  EXPECT_EQ(rec.horizon(), H);
  EXPECT_GE(arith.horizon(), H);
  EXPECT_EQ(*rec.valuation(), 1);
  // 4 eta2^2 eta4 eta8^2 begins 4q
  auto t = quotient_expand(quotient(4, {{2, 2}, {4, 1}, {8, 2}}), 10);
  EXPECT_EQ(*t.valuation(), 1);
  EXPECT_EQ(t.coefficient(1), 4);
  EXPECT_EQ(quotient(4, {{2, 2}, {4, 1}, {8, 2}}).weight(), Rational(5, 2));
}

TEST(Eta, QuotientTimesInverseIsOne) {
  auto a = quotient_expand(quotient(1, {{1, 3}, {6, -2}, {4, 1}}), 80);
  auto b = quotient_expand(quotient(1, {{1, -3}, {6, 2}, {4, -1}}), 80);
  auto p = a * b;
  EXPECT_TRUE(agree_to_shared_horizon(p, RationalSeries::constant(1)));
  EXPECT_EQ(p.horizon(), 80 - Rational(5, 24));  // valuations -5/24 and 5/24
  auto trivial = quotient_expand(quotient(1, {{5, 0}}), 30);
  EXPECT_EQ(trivial.size(), 1u);
}

TEST(G2, DivisorSums) {
  auto g = g2_expand(1, 2000, false);
  EXPECT_EQ(g.coefficient(0).part(0), Rational(-1, 24));
  EXPECT_EQ(g.coefficient(2).part(0), 3);
  for (long long n = 1; n <= 2000; ++n) ASSERT_EQ(g.coefficient(make_rational(n)).part(0), make_rational(sigma_naive(n))) << n;
  auto gs = g2_expand(2, 10, true);
  EXPECT_EQ(format_coeff(gs.coefficient(0)), "-1/24 + 1/2 * w^1");
  EXPECT_EQ(gs.coefficient(1).is_zero(), true);
  EXPECT_EQ(gs.coefficient(4).part(0), 3);
}

TEST(EtaExpr, ParsePrintRoundTrip) {
  for (std::string text : {"8*e8^4*e24^9/(e4*e12^3*e16*e48^3) - 32*e8*e16*e48^3", "4*e2^2*e4*e8^2",
                           "8/7*e2^2*e4*e8^2*(G2[1] - 5*G2[2] + 10*G2[8] - 24*G2[16] + 4*e8^2*e16^4/e4^2)",
                           "24*e2^2*e4*e8^2*(G2s[2] - G2s[4] + 4*G2s[8])", "-4*e2^2*e4*e8^2", "4*e2^5*e8^2/e1^2"}) {
    auto e = parse_eta_expr(text);
    auto printed = e.to_string();
    EXPECT_EQ(parse_eta_expr(printed).to_string(), printed) << text;
    EXPECT_TRUE(agree_to_shared_horizon(e.expand(40), parse_eta_expr(printed).expand(40)));
  }
  EXPECT_EQ(parse_eta_expr(" 4 * e2 ^ 2 * e4 * e8^2 ").to_string(), "4*e2^2*e4*e8^2");
  EXPECT_EQ(parse_eta_expr("8*e8^4/(e4*e12^3)").to_string(), "8*e8^4/(e4*e12^3)");
  EXPECT_EQ(parse_eta_expr("4*e2^5*e8^2/e1^2").to_string(), "4*e2^5*e8^2/e1^2");
}

TEST(EtaExpr, ParseErrors) {
  for (std::string bad : {"", "4*", "e0", "e2^", "G2[0]", "G2[3", "(e1", "x1", "e1)", "4/0*e1"}) {
    try {
      (void)parse_eta_expr(bad);
      ADD_FAILURE() << bad;
    } catch (const Error &e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << bad;
    }
  }
}

TEST(EtaExpr, ExpansionAndWeights) {
  auto e = parse_eta_expr("8*e8^4*e24^9/(e4*e12^3*e16*e48^3) - 32*e8*e16*e48^3");
  EXPECT_EQ(*e.weight(), Rational(5, 2));
  auto s = e.expand(60);
  auto a = quotient_expand(quotient(8, {{8, 4}, {24, 9}, {4, -1}, {12, -3}, {16, -1}, {48, -3}}), 60);
  auto b = quotient_expand(quotient(32, {{8, 1}, {16, 1}, {48, 3}}), 60);
  EXPECT_TRUE(agree_to_shared_horizon(s, to_w(a - b)));
  EXPECT_EQ(s.horizon(), 60);

  auto d3 = parse_eta_expr("8/7*e2^2*e4*e8^2*(G2[1] - 5*G2[2] + 10*G2[8] - 24*G2[16] + 4*e8^2*e16^4/e4^2)");
  EXPECT_EQ(*d3.weight(), Rational(9, 2));
  EXPECT_FALSE(d3.has_completion());
  auto ds = d3.expand(50);
  EXPECT_EQ(ds.horizon(), 50);
  auto eta5 = to_w(quotient_expand(quotient(Rational(8, 7), {{2, 2}, {4, 1}, {8, 2}}), 50));
  auto inner = g2_expand(1, 50, false) - g2_expand(2, 50, false).scaled(5) + g2_expand(8, 50, false).scaled(10) -
               g2_expand(16, 50, false).scaled(24) + to_w(quotient_expand(quotient(4, {{8, 2}, {16, 4}, {4, -2}}), 50));
  EXPECT_TRUE(agree_to_shared_horizon(ds, eta5 * inner));

  auto star = parse_eta_expr("24*e2^2*e4*e8^2*(G2s[2] - G2s[4] + 4*G2s[8])");
  EXPECT_TRUE(star.has_completion());
  auto ss = star.expand(30);
  // w-part: 24 eta-product * (1/2 - 1/4 + 4/8) w
  auto w1 = w_part(ss, 1);
  auto expect = quotient_expand(quotient(18, {{2, 2}, {4, 1}, {8, 2}}), 30);
  EXPECT_TRUE(agree_to_shared_horizon(w1, expect));
  EXPECT_FALSE(parse_eta_expr("e1 + 1").weight().has_value());
  EXPECT_EQ(*parse_eta_expr("(e1^2)^-1").weight(), -1);
}
