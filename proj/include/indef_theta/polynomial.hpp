#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "quadform.hpp"

namespace indef_theta {

using Monomial = std::vector<int>;

inline int total_degree(const Monomial &m) {
  int d = 0;
  for (int e : m) d += e;
  return d;
}

/// Graded order, higher degree first, then lexicographically larger first
/// (v1^2 before v1*v2 before v2^2).
struct GrlexDescending {
  bool operator()(const Monomial &a, const Monomial &b) const {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) return da > db;
    return a > b;
  }
};

class Polynomial {
public:
  using Terms = std::map<Monomial, Rational, GrlexDescending>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : n_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational &c) {
    Polynomial p(nvars);
    p.add_term(Monomial(nvars, 0), c);
    return p;
  }
  static Polynomial variable(std::size_t nvars, std::size_t i) {
    Polynomial p(nvars);
    Monomial m(nvars, 0);
    m.at(i) = 1;
    p.add_term(m, 1);
    return p;
  }
  static Polynomial monomial(const Monomial &m, const Rational &c = 1) {
    Polynomial p(m.size());
    p.add_term(m, c);
    return p;
  }
  /// Sum_j coeffs[j] v_j.
  static Polynomial linear(const RationalVector &coeffs) {
    Polynomial p(coeffs.size());
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      Monomial m(coeffs.size(), 0);
      m[j] = 1;
      p.add_term(m, coeffs[j]);
    }
    return p;
  }

  std::size_t nvars() const { return n_; }
  const Terms &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Monomial &m, const Rational &c) {
    if (m.size() != n_) fail(ErrorCode::DimensionMismatch, "monomial length vs number of variables");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rational coefficient(const Monomial &m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  /// -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : total_degree(terms_.begin()->first); }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    int d = degree();
    for (const auto &[m, c] : terms_)
      if (total_degree(m) != d) return false;
    return true;
  }

  Polynomial homogeneous_part(int d) const {
    Polynomial p(n_);
    for (const auto &[m, c] : terms_)
      if (total_degree(m) == d) p.terms_.emplace(m, c);
    return p;
  }

  Polynomial derivative(std::size_t i) const {
    Polynomial p(n_);
    for (const auto &[m, c] : terms_) {
      if (m[i] == 0) continue;
      Monomial k = m;
      --k[i];
      p.add_term(k, c * m[i]);
    }
    return p;
  }

  Polynomial &operator+=(const Polynomial &o) {
    check_same(o);
    for (const auto &[m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial &operator-=(const Polynomial &o) {
    check_same(o);
    for (const auto &[m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial &operator*=(const Rational &s) {
    if (s == 0) terms_.clear();
    for (auto &[m, c] : terms_) c *= s;
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial &b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial &b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend Polynomial operator*(Polynomial a, const Rational &s) { return a *= s; }
  friend Polynomial operator*(const Rational &s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial &a, const Polynomial &b) {
    a.check_same(b);
    Polynomial p(a.n_);
    for (const auto &[ma, ca] : a.terms_)
      for (const auto &[mb, cb] : b.terms_) {
        Monomial m(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i) m[i] = ma[i] + mb[i];
        p.add_term(m, ca * cb);
      }
    return p;
  }
  friend bool operator==(const Polynomial &a, const Polynomial &b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

  Polynomial pow(int k) const {
    Polynomial r = constant(n_, 1);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  template <class T> T eval(const std::vector<T> &v) const {
    if (v.size() != n_) fail(ErrorCode::DimensionMismatch, "evaluation point length");
    T s = T(0);
    for (const auto &[m, c] : terms_) {
      T t = convert<T>(c);
      for (std::size_t i = 0; i < n_; ++i)
        for (int e = 0; e < m[i]; ++e) t *= v[i];
      s += t;
    }
    return s;
  }

  /// Rescales by a positive rational to a primitive integer polynomial;
  /// returns that factor.
  Rational make_primitive() {
    if (terms_.empty()) return 1;
    Integer l = 1, g = 0;
    for (const auto &[m, c] : terms_) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    for (const auto &[m, c] : terms_) {
      Integer num = c.get_num() * (l / c.get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
    }
    Rational factor(l, g);
    factor.canonicalize();
    *this *= factor;
    return factor;
  }

private:
  template <class T> static T convert(const Rational &c) {
    if constexpr (std::is_same_v<T, Rational>) return c;
    else return static_cast<T>(c.get_d());
  }

  void check_same(const Polynomial &o) const {
    if (o.n_ != n_) fail(ErrorCode::DimensionMismatch, "polynomials in different numbers of variables");
  }

  std::size_t n_ = 0;
  Terms terms_;
};

// ---------------------------------------------------------------------------
// Text format

inline std::string format_polynomial(const Polynomial &p) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto &[m, c] : p.terms()) {
    bool neg = c < 0;
    Rational a = neg ? Rational(-c) : c;
    if (first) s += neg ? "-" : "";
    else s += neg ? " - " : " + ";
    first = false;
    s += "(" + format_rational(a) + ")";
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      s += "*v" + std::to_string(i + 1);
      if (m[i] > 1) s += "^" + std::to_string(m[i]);
    }
  }
  return s;
}

namespace detail {

class PolyParser {
public:
  PolyParser(std::string_view text, std::size_t nvars) : n_(nvars) {
    for (char ch : text)
      if (!std::isspace(static_cast<unsigned char>(ch))) s_.push_back(ch);
  }

  Polynomial parse() {
    if (s_.empty()) error("empty polynomial");
    Polynomial p = expr();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

private:
  [[noreturn]] void error(const std::string &msg) const {
    fail(ErrorCode::ParseError, "polynomial '" + s_ + "' at offset " + std::to_string(pos_) + ": " + msg);
  }
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  bool eat(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  long long integer() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) error("expected integer");
    if (pos_ - start > 18) error("integer literal too long");
    return std::stoll(s_.substr(start, pos_ - start));
  }
  Integer big_integer() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) error("expected integer");
    return Integer(s_.substr(start, pos_ - start));
  }

  Polynomial expr() {
    Polynomial p = term();
    while (pos_ < s_.size()) {
      if (eat('+')) p += term();
      else if (eat('-')) p -= term();
      else break;
    }
    return p;
  }

  Polynomial term() {
    Polynomial p = factor();
    while (true) {
      if (eat('*')) p = p * factor();
      else if (eat('/')) {
        Polynomial q = factor();
        if (q.degree() > 0) error("division by a non-constant");
        Rational c = q.coefficient(Monomial(n_, 0));
        if (c == 0) error("division by zero");
        p *= 1 / c;
      } else break;
    }
    return p;
  }

  Polynomial factor() {
    if (eat('-')) return -factor();
    if (eat('+')) return factor();
    Polynomial base(n_);
    if (eat('(')) {
      base = expr();
      if (!eat(')')) error("expected ')'");
    } else if (eat('v')) {
      long long i = integer();
      if (i < 1 || static_cast<std::size_t>(i) > n_) error("variable index out of range");
      base = Polynomial::variable(n_, static_cast<std::size_t>(i - 1));
    } else if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      base = Polynomial::constant(n_, Rational(big_integer()));
    } else {
      error("expected factor");
    }
    if (eat('^')) base = base.pow(static_cast<int>(integer()));
    return base;
  }

  std::string s_;
  std::size_t pos_ = 0;
  std::size_t n_;
};

} // namespace detail

/// Parses sums of products of rationals, v1..vn, parentheses and ^k.
inline Polynomial parse_polynomial(std::string_view text, std::size_t nvars) {
  return detail::PolyParser(text, nvars).parse();
}

// ---------------------------------------------------------------------------
// Differential operators

inline Polynomial laplacian(const QuadraticForm &form, const Polynomial &f) {
  if (f.nvars() != form.dim()) fail(ErrorCode::DimensionMismatch, "polynomial vs form dimension");
  const RMatrix &M = form.inverse();
  std::size_t n = form.dim();
  Polynomial r(n);
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial di = f.derivative(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (M(i, j) == 0) continue;
      r += di.derivative(j) * M(i, j);
    }
  }
  return r;
}

inline Polynomial euler(const Polynomial &f) {
  Polynomial r(f.nvars());
  for (const auto &[m, c] : f.terms()) r.add_term(m, c * total_degree(m));
  return r;
}

inline Polynomial dir_deriv(const RationalVector &c, const Polynomial &f, int k = 1) {
  if (c.size() != f.nvars()) fail(ErrorCode::DimensionMismatch, "direction vs polynomial dimension");
  Polynomial r = f;
  for (int s = 0; s < k && !r.is_zero(); ++s) {
    Polynomial next(f.nvars());
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) next += r.derivative(i) * c[i];
    r = std::move(next);
  }
  return r;
}

/// v -> f(g v).
inline Polynomial compose(const Polynomial &f, const RMatrix &g) {
  std::size_t n = f.nvars();
  if (!g.square() || g.rows() != n) fail(ErrorCode::DimensionMismatch, "composition matrix vs polynomial dimension");
  std::vector<std::vector<Polynomial>> powers(n);
  auto power = [&](std::size_t i, int e) -> const Polynomial & {
    auto &cache = powers[i];
    if (cache.empty()) {
      cache.push_back(Polynomial::constant(n, 1));
      cache.push_back(Polynomial::linear(g.row(i)));
    }
    while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * cache[1]);
    return cache[e];
  };
  Polynomial r(n);
  for (const auto &[m, c] : f.terms()) {
    Polynomial t = Polynomial::constant(n, c);
    for (std::size_t i = 0; i < n; ++i)
      if (m[i]) t = t * power(i, m[i]);
    r += t;
  }
  return r;
}

inline Polynomial compose(const Polynomial &f, const IMatrix &g) { return compose(f, g.cast<Rational>()); }

inline Polynomial psi_apply(const Polynomial &f, const IMatrix &g) { return f - compose(f, g); }

using MonomialPredicate = std::function<bool(const Monomial &)>;

inline MonomialPredicate all_monomials() {
  return [](const Monomial &) { return true; };
}

/// parity[i] = 0 (even in v_{i+1}), 1 (odd) or -1 (unrestricted).
inline MonomialPredicate parity_predicate(std::vector<int> parity) {
  return [parity = std::move(parity)](const Monomial &m) {
    for (std::size_t i = 0; i < parity.size() && i < m.size(); ++i)
      if (parity[i] >= 0 && m[i] % 2 != parity[i]) return false;
    return true;
  };
}

inline std::vector<Monomial> monomials_of_degree(std::size_t n, int d) {
  std::vector<Monomial> out;
  Monomial m(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i + 1 == n) {
      m[i] = left;
      out.push_back(m);
      return;
    }
    for (int e = left; e >= 0; --e) {
      m[i] = e;
      rec(i + 1, left - e);
    }
  };
  if (n == 0) return out;
  rec(0, d);
  return out;
}

inline std::vector<Monomial> monomial_basis(std::size_t n, int d, const MonomialPredicate &pred) {
  std::vector<Monomial> basis;
  for (auto &m : monomials_of_degree(n, d))
    if (pred(m)) basis.push_back(std::move(m));
  return basis;
}

/// Unique h in the predicate span of degree deg f with h - h∘g = f.
inline Polynomial psi_invert(const Polynomial &f, const IMatrix &g, const MonomialPredicate &pred) {
  if (!f.is_homogeneous()) fail(ErrorCode::NotHomogeneous, "psi_invert needs a homogeneous polynomial");
  std::size_t n = f.nvars();
  if (f.is_zero()) return Polynomial(n);
  int d = f.degree();
  auto basis = monomial_basis(n, d, pred);
  std::map<Monomial, std::size_t> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index[basis[i]] = i;
  RationalVector rhs(basis.size(), Rational(0));
  for (const auto &[m, c] : f.terms()) {
    auto it = index.find(m);
    if (it == index.end()) fail(ErrorCode::NotInSubspace, "right-hand side has a monomial outside the subspace");
    rhs[it->second] = c;
  }
  RMatrix M = RMatrix::identity(basis.size());
  RMatrix gq = g.cast<Rational>();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    Polynomial img = compose(Polynomial::monomial(basis[j]), gq);
    for (const auto &[m, c] : img.terms()) {
      auto it = index.find(m);
      if (it == index.end()) fail(ErrorCode::SubspaceNotInvariant, "subspace is not invariant under composition with g");
      M(it->second, j) -= c;
    }
  }
  auto h = solve(M, rhs);
  if (!h) fail(ErrorCode::SingularOperator, "I - C_g is singular on the selected subspace");
  Polynomial r(n);
  for (std::size_t i = 0; i < basis.size(); ++i) r.add_term(basis[i], (*h)[i]);
  return r;
}

inline bool is_spherical(const QuadraticForm &form, const Polynomial &f) {
  return f.is_homogeneous() && laplacian(form, f).is_zero();
}

inline std::vector<Polynomial> spherical_kernel(const QuadraticForm &form, int d, const MonomialPredicate &pred) {
  std::size_t n = form.dim();
  auto basis = monomial_basis(n, d, pred);
  std::vector<Polynomial> images;
  std::map<Monomial, std::size_t, GrlexDescending> rows;
  for (const auto &m : basis) {
    images.push_back(laplacian(form, Polynomial::monomial(m)));
    for (const auto &[mm, c] : images.back().terms()) rows.try_emplace(mm, rows.size());
  }
  RMatrix M(rows.size(), basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (const auto &[mm, c] : images[j].terms()) M(rows[mm], j) = c;
  std::vector<Polynomial> out;
  for (const auto &x : nullspace(M)) {
    Polynomial p(n);
    for (std::size_t j = 0; j < basis.size(); ++j) p.add_term(basis[j], x[j]);
    out.push_back(std::move(p));
  }
  return out;
}

/// Sum_i (f_i - eps_i f_i∘g_i); eps defaults to all +1.
inline Polynomial condition_residual(const std::vector<Polynomial> &fs, const std::vector<IMatrix> &gs,
                                     const std::vector<int> &eps = {}) {
  if (fs.size() != gs.size() || (!eps.empty() && eps.size() != fs.size()))
    fail(ErrorCode::DimensionMismatch, "condition needs equally many polynomials and automorphisms");
  if (fs.empty()) return Polynomial();
  int d = -1;
  for (const auto &f : fs) {
    if (f.is_zero()) continue;
    if (!f.is_homogeneous()) fail(ErrorCode::NotHomogeneous, "condition needs homogeneous polynomials");
    if (d >= 0 && f.degree() != d) fail(ErrorCode::DegreeMismatch, "polynomials of different degrees");
    d = f.degree();
  }
  Polynomial r(fs[0].nvars());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    r += fs[i];
    Polynomial c = compose(fs[i], gs[i]);
    if (!eps.empty() && eps[i] < 0) r += c;
    else r -= c;
  }
  return r;
}

inline bool check_condition(const std::vector<Polynomial> &fs, const std::vector<IMatrix> &gs,
                            const std::vector<int> &eps = {}) {
  return condition_residual(fs, gs, eps).is_zero();
}

// ---------------------------------------------------------------------------
// Almost polynomials: sum_k w^k p_k with w standing for 1/(8 pi).

class AlmostPolynomial {
public:
  AlmostPolynomial() = default;
  explicit AlmostPolynomial(const Polynomial &p) : n_(p.nvars()), parts_{p} { trim(); }
  explicit AlmostPolynomial(std::vector<Polynomial> parts, std::size_t nvars = 0)
      : n_(parts.empty() ? nvars : parts[0].nvars()), parts_(std::move(parts)) {
    trim();
  }

  std::size_t nvars() const { return n_; }
  /// -1 for zero.
  int w_degree() const { return static_cast<int>(parts_.size()) - 1; }
  const std::vector<Polynomial> &parts() const { return parts_; }
  Polynomial part(int k) const {
    if (k < 0 || k > w_degree()) return Polynomial(nvars());
    return parts_[k];
  }

  friend bool operator==(const AlmostPolynomial &a, const AlmostPolynomial &b) { return a.parts_ == b.parts_; }

  friend AlmostPolynomial operator-(const AlmostPolynomial &a, const AlmostPolynomial &b) {
    std::size_t len = std::max(a.parts_.size(), b.parts_.size());
    std::size_t n = std::max(a.nvars(), b.nvars());
    std::vector<Polynomial> r(len, Polynomial(n));
    for (std::size_t k = 0; k < a.parts_.size(); ++k) r[k] += a.parts_[k];
    for (std::size_t k = 0; k < b.parts_.size(); ++k) r[k] -= b.parts_[k];
    return AlmostPolynomial(std::move(r), n);
  }

  template <class F> AlmostPolynomial map(F &&fn) const {
    std::vector<Polynomial> r;
    for (const auto &p : parts_) r.push_back(fn(p));
    return AlmostPolynomial(std::move(r), n_);
  }

  AlmostPolynomial scaled(const Rational &s) const {
    return map([&](const Polynomial &p) { return p * s; });
  }

  /// Shifts by w^j.
  AlmostPolynomial times_w(int j = 1) const {
    std::vector<Polynomial> r(j, Polynomial(nvars()));
    r.insert(r.end(), parts_.begin(), parts_.end());
    return AlmostPolynomial(std::move(r), n_);
  }

  /// Evaluates at a point with a numeric value for w.
  double eval(const std::vector<double> &v, double w) const {
    double s = 0, wk = 1;
    for (const auto &p : parts_) {
      s += wk * p.eval(v);
      wk *= w;
    }
    return s;
  }

private:
  void trim() {
    while (!parts_.empty() && parts_.back().is_zero()) parts_.pop_back();
  }
  std::size_t n_ = 0;
  std::vector<Polynomial> parts_;
};

inline std::string format_almost(const AlmostPolynomial &a) {
  if (a.w_degree() < 0) return "0";
  std::string s;
  for (int k = 0; k <= a.w_degree(); ++k) {
    if (a.part(k).is_zero()) continue;
    if (!s.empty()) s += " + ";
    s += "[" + format_polynomial(a.part(k)) + "]";
    if (k) s += "*w^" + std::to_string(k);
  }
  return s;
}

/// e^{-Delta/(8 pi)} f = sum_k (-1)^k w^k / k! Delta^k f.
inline AlmostPolynomial hat(const QuadraticForm &form, const Polynomial &f) {
  if (!f.is_homogeneous()) fail(ErrorCode::NotHomogeneous, "hat needs a homogeneous polynomial");
  std::vector<Polynomial> parts;
  Polynomial cur = f;
  Rational coef = 1;
  for (int k = 0; !cur.is_zero(); ++k) {
    parts.push_back(cur * coef);
    cur = laplacian(form, cur);
    coef = -coef / (k + 1);
  }
  return AlmostPolynomial(std::move(parts), f.nvars());
}

/// D = E - Delta/(4 pi) = E - 2 w Delta on w-graded coefficients.
inline AlmostPolynomial vigneras_operator(const QuadraticForm &form, const AlmostPolynomial &p) {
  AlmostPolynomial e = p.map([](const Polynomial &q) { return euler(q); });
  AlmostPolynomial l = p.map([&](const Polynomial &q) { return laplacian(form, q); }).scaled(2).times_w(1);
  return e - l;
}

inline AlmostPolynomial dir_deriv(const RationalVector &c, const AlmostPolynomial &p, int k = 1) {
  return p.map([&](const Polynomial &q) { return dir_deriv(c, q, k); });
}

} // namespace indef_theta
