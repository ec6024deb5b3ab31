#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "indef_theta/lattice.hpp"
#include "lattice_oracle.hpp"

using namespace indef_theta;

namespace {

RationalVector rv(std::initializer_list<long long> xs) {
  RationalVector v;
  for (auto x : xs) v.push_back(make_rational(x));
  return v;
}

PosDefForm identity_form(std::size_t n) { return PosDefForm{RMatrix::identity(n)}; }

} // namespace

TEST(Enumerate, UnitCircle) {
  auto pts = enumerate({identity_form(2), rv({0, 0}), 1});
  std::vector<RationalVector> expected = {rv({0, 0}), rv({-1, 0}), rv({0, -1}), rv({0, 1}), rv({1, 0})};
  EXPECT_EQ(pts, expected);
}

TEST(Enumerate, HalfShift) {
  auto pts = enumerate({identity_form(2), RationalVector{Rational(1, 2), 0}, Rational(1, 4)});
  std::vector<RationalVector> expected = {{Rational(-1, 2), 0}, {Rational(1, 2), 0}};
  EXPECT_EQ(pts, expected);
}

TEST(Enumerate, SumOfThreeSquares) {
  EXPECT_EQ(enumerate({identity_form(3), rv({0, 0, 0}), 25}).size(), 515u);
  EXPECT_EQ(enumerate({identity_form(3), rv({0, 0, 0}), -1}).size(), 0u);
  EXPECT_EQ(enumerate({identity_form(3), rv({0, 0, 0}), 0}).size(), 1u);
}

TEST(Enumerate, OrderIsGradedThenLex) {
  RMatrix G{{2, 1}, {1, 3}};
  auto pts = enumerate({PosDefForm{G}, RationalVector{Rational(1, 3), Rational(-1, 5)}, 40});
  PosDefForm pd{G};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    Rational a = pd.eval(pts[i - 1]), b = pd.eval(pts[i]);
    EXPECT_TRUE(a < b || (a == b && pts[i - 1] < pts[i]));
  }
}

TEST(Enumerate, BoundTooLarge) {
  try {
    enumerate({identity_form(3), rv({0, 0, 0}), 1000000}, 1e5);
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundTooLarge);
  }
}

TEST(Enumerate, MatchesBruteForceRandom) {
  std::mt19937 rng(2024);
  for (int t = 0; t < 30; ++t) {
    auto inst = oracle::random_instance(rng, 1 + t % 4, 20000);
    auto pts = enumerate({PosDefForm{inst.G}, inst.shift, inst.bound});
    auto brute = oracle::brute_force(inst);
    ASSERT_EQ(std::set<RationalVector>(pts.begin(), pts.end()), brute) << "instance " << t;
    EXPECT_EQ(pts.size(), brute.size());
  }
}

TEST(Enumerate, FloatVariantAgreesAwayFromBoundary) {
  RMatrix G{{3, 1, 0}, {1, 2, Rational(1, 2)}, {0, Rational(1, 2), 1}};
  RationalVector lam{Rational(1, 4), 0, Rational(-2, 3)};
  auto sc = to_double(complete_squares(G));
  std::size_t count = 0;
  enumerate_visit_float(sc, {0.25, 0, -2.0 / 3}, 30.5, [&](const IntVector &) { ++count; });
  EXPECT_EQ(count, enumerate({PosDefForm{G}, lam, Rational(61, 2)}).size());
}

TEST(Support, DependentConesGiveNothing) {
  auto f = make_form(IMatrix{{2, 0, 0}, {0, 8, 0}, {0, 0, -4}});
  auto c = make_cone_vector(f, rv({0, 0, -1}), rv({0, 0, -1}));
  EXPECT_TRUE(support_terms(f, c, c, rv({0, 0, 0}), 50).empty());
  auto c2 = make_cone_vector(f, rv({0, 0, -3}), rv({0, 0, -1}));
  EXPECT_TRUE(support_terms(f, c, c2, rv({0, 0, 0}), 50).empty());
}

TEST(Support, SignatureOneOneSmallNorms) {
  auto f = make_form(IMatrix{{2, 5}, {5, 2}});
  auto c1 = make_cone_vector(f, rv({-2, 5}), rv({-2, 5}));
  auto c2 = make_cone_vector(f, rv({-5, 2}), rv({-2, 5}));
  auto terms = support_terms(f, c1, c2, rv({0, 0}), 1);
  ASSERT_EQ(terms.size(), 4u);
  std::map<RationalVector, int> got;
  for (const auto &t : terms) {
    EXPECT_EQ(t.qValue, 1);
    got[t.point] = t.signFactor;
  }
  EXPECT_EQ(got[rv({1, 0})], 1);
  EXPECT_EQ(got[rv({0, 1})], 1);
  EXPECT_EQ(got[rv({-1, 0})], -1);
  EXPECT_EQ(got[rv({0, -1})], -1);
}

TEST(Support, SymmetriesAndCompleteness) {
  auto f = make_form(IMatrix{{2, 0, 0}, {0, 8, 0}, {0, 0, -4}});
  auto c0 = rv({0, 0, -1});
  auto c1 = make_cone_vector(f, c0, c0);
  auto c2 = make_cone_vector(f, rv({1, 1, -3}), c0);
  Rational M = 60;
  auto terms = support_terms(f, c1, c2, rv({0, 0, 0}), M);
  std::map<RationalVector, int> sf;
  for (const auto &t : terms) {
    sf[t.point] = t.signFactor;
    EXPECT_GE(t.qValue, 1);  // only positive q-powers
  }
  for (const auto &[p, s] : sf) {
    RationalVector m = p;
    for (auto &x : m) x = -x;
    ASSERT_TRUE(sf.count(m));
    EXPECT_EQ(sf[m], -s);
  }
  auto swapped = support_terms(f, c2, c1, rv({0, 0, 0}), M);
  ASSERT_EQ(swapped.size(), terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    EXPECT_EQ(swapped[i].point, terms[i].point);
    EXPECT_EQ(swapped[i].signFactor, -terms[i].signFactor);
  }
  // completeness against a box scan around the minorant's ellipsoid
  auto radii = oracle::box_radii(qplus_form(f, c1, c2).G, M);
  long long R0 = std::ceil(radii[0]), R1 = std::ceil(radii[1]), R2 = std::ceil(radii[2]);
  std::size_t box = 0;
  for (long long a = -R0; a <= R0; ++a)
    for (long long b = -R1; b <= R1; ++b)
      for (long long e = -R2; e <= R2; ++e) {
        RationalVector v = rv({a, b, e});
        int s = sign(eval_B(f, c1.c, v)) - sign(eval_B(f, c2.c, v));
        if (s != 0 && eval_Q(f, v) <= M) {
          ++box;
          EXPECT_EQ(sf.count(v), 1u);
        }
      }
  EXPECT_EQ(box, terms.size());
}
