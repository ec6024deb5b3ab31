#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qseries.hpp"

namespace indef_theta {

namespace detail {

inline long long floor_key(const Rational &x, long long kappa) {
  Rational k = x * make_rational(kappa);
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), k.get_num_mpz_t(), k.get_den_mpz_t());
  return to_ll(fl);
}

inline std::vector<long long> divisor_sums(long long H) {
  std::vector<long long> s(std::max<long long>(H, 0) + 1, 0);
  for (long long d = 1; d <= H; ++d)
    for (long long m = d; m <= H; m += d) s[m] += d;
  return s;
}

} // namespace detail

/// eta(M tau) = q^{M/24} sum_k (-1)^k q^{M k(3k-1)/2}, exact through exponent maxQ.
inline RationalSeries eta_expand(long long M, const Rational &maxQ) {
  if (M < 1) fail(ErrorCode::DimensionMismatch, "eta multiplier must be positive");
  RationalSeries s(24, detail::floor_key(maxQ, 24));
  for (long long k = 0;; ++k) {
    bool any = false;
    for (long long kk : {k, -k - 1}) {
      long long key = M + 24 * M * (kk * (3 * kk - 1) / 2);
      if (key > s.horizon_key()) continue;
      any = true;
      s.add_key(key, (kk % 2) ? Rational(-1) : Rational(1));
    }
    if (!any) break;
  }
  return s;
}

struct EtaQuotient {
  Rational scalar = 1;
  std::map<long long, int> factors;  // M -> exponent

  Rational leading_exponent() const {
    Rational e = 0;
    for (auto [M, k] : factors) e += make_rational(M * k, 24);
    return e;
  }
  Rational weight() const {
    Rational w = 0;
    for (auto [M, k] : factors) w += make_rational(k, 2);
    return w;
  }
};

/// scalar * prod eta(M tau)^e through exponent maxQ, via the logarithmic-derivative
/// recurrence n a_n = -sum_k c_k a_{n-k}, c_k = sum_{M|k} e_M M sigma(k/M).
inline RationalSeries quotient_expand(const EtaQuotient &eq, const Rational &maxQ) {
  Rational lead = eq.leading_exponent();
  long long hkey = detail::floor_key(maxQ, 24);
  long long lkey = to_ll(Rational(lead * 24).get_num());
  RationalSeries s(24, hkey);
  if (hkey < lkey || eq.scalar == 0) return s;
  long long H = (hkey - lkey) / 24;
  auto sigma = detail::divisor_sums(H);
  std::vector<Integer> c(H + 1, 0), a(H + 1, 0);
  for (auto [M, e] : eq.factors) {
    if (M < 1) fail(ErrorCode::DimensionMismatch, "eta multiplier must be positive");
    for (long long k = M; k <= H; k += M) c[k] += Integer(static_cast<long>(e * M)) * Integer(static_cast<long>(sigma[k / M]));
  }
  a[0] = 1;
  for (long long n = 1; n <= H; ++n) {
    Integer acc = 0;
    for (long long k = 1; k <= n; ++k)
      if (c[k] != 0 && a[n - k] != 0) acc += c[k] * a[n - k];
    a[n] = -acc / Integer(static_cast<long>(n));
  }
  for (long long n = 0; n <= H; ++n)
    if (a[n] != 0) s.add_key(lkey + 24 * n, eq.scalar * Rational(a[n]));
  return s;
}

/// G2(M tau) = -1/24 + sum sigma(n) q^{Mn}; the completion adds w/M at q^0 (w <-> 1/(8 pi y)).
inline WSeries g2_expand(long long M, const Rational &maxQ, bool completed) {
  if (M < 1) fail(ErrorCode::DimensionMismatch, "G2 multiplier must be positive");
  long long hkey = detail::floor_key(maxQ, 1);
  WSeries s(1, hkey);
  std::vector<Rational> c0{Rational(-1, 24)};
  if (completed) c0.push_back(make_rational(1, M));
  s.add_key(0, WPoly(c0));
  auto sigma = detail::divisor_sums(hkey / M);
  for (long long n = 1; n * M <= hkey; ++n) s.add_key(n * M, WPoly(make_rational(sigma[n])));
  return s;
}

/// Identity right-hand sides: sums of products of rationals, eta powers, G2 terms and
/// parenthesised subexpressions.
class EtaExpr {
public:
  enum class Kind { Number, Eta, G2, G2s, Sum, Product, Power };

  static EtaExpr number(const Rational &r) {
    EtaExpr e(Kind::Number);
    e.value_ = r;
    return e;
  }
  static EtaExpr eta(long long M, int k = 1) {
    EtaExpr e(Kind::Eta);
    e.M_ = M;
    e.exp_ = k;
    return e;
  }
  static EtaExpr g2(long long M, bool completed) {
    EtaExpr e(completed ? Kind::G2s : Kind::G2);
    e.M_ = M;
    return e;
  }
  static EtaExpr sum(std::vector<std::pair<int, EtaExpr>> terms) {
    EtaExpr e(Kind::Sum);
    for (auto &[s, t] : terms) {
      e.signs_.push_back(s);
      e.kids_.push_back(std::move(t));
    }
    return e;
  }
  /// Numbers are folded into one leading scalar and nested products are flattened.
  static EtaExpr product(std::vector<EtaExpr> num, std::vector<EtaExpr> den) {
    EtaExpr e(Kind::Product);
    Rational scalar = 1;
    std::vector<EtaExpr> n, d;
    auto add = [&](auto &self, EtaExpr &x, bool top) -> void {
      if (x.kind_ == Kind::Number) {
        if (top) scalar *= x.value_;
        else if (x.value_ == 0) fail(ErrorCode::ParseError, "division by zero in expression");
        else scalar /= x.value_;
      } else if (x.kind_ == Kind::Product) {
        for (auto &k : x.kids_) self(self, k, top);
        for (auto &k : x.den_) self(self, k, !top);
      } else {
        (top ? n : d).push_back(std::move(x));
      }
    };
    for (auto &x : num) add(add, x, true);
    for (auto &x : den) add(add, x, false);
    if (scalar != 1 || n.empty()) n.insert(n.begin(), number(scalar));
    e.kids_ = std::move(n);
    e.den_ = std::move(d);
    return e;
  }
  static EtaExpr power(EtaExpr base, int k) {
    EtaExpr e(Kind::Power);
    e.kids_.push_back(std::move(base));
    e.exp_ = k;
    return e;
  }

  Kind kind() const { return kind_; }

  /// Weight (eta: 1/2, G2: 2, numbers: 0); nullopt for a sum of unequal weights.
  std::optional<Rational> weight() const {
    switch (kind_) {
    case Kind::Number: return Rational(0);
    case Kind::Eta: return make_rational(exp_, 2);
    case Kind::G2:
    case Kind::G2s: return Rational(2);
    case Kind::Power: {
      auto w = kids_[0].weight();
      if (!w) return std::nullopt;
      return *w * make_rational(exp_);
    }
    case Kind::Sum: {
      std::optional<Rational> w;
      for (const auto &k : kids_) {
        auto kw = k.weight();
        if (!kw || (w && *w != *kw)) return std::nullopt;
        w = kw;
      }
      return w ? w : Rational(0);
    }
    case Kind::Product: {
      Rational w = 0;
      for (const auto &k : kids_) {
        auto kw = k.weight();
        if (!kw) return std::nullopt;
        w += *kw;
      }
      for (const auto &k : den_) {
        auto kw = k.weight();
        if (!kw) return std::nullopt;
        w -= *kw;
      }
      return w;
    }
    }
    return std::nullopt;
  }

  bool has_completion() const {
    if (kind_ == Kind::G2s) return true;
    for (const auto &k : kids_)
      if (k.has_completion()) return true;
    for (const auto &k : den_)
      if (k.has_completion()) return true;
    return false;
  }

  /// Exact expansion through maxQ, in Q[w].
  WSeries expand(const Rational &maxQ) const {
    // leaf precision is raised until the pessimistic horizon reaches maxQ
    Rational extra = 0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      WSeries s = expand_at(maxQ + extra);
      if (!s.is_exact() && s.horizon() < maxQ) {
        extra += maxQ - s.horizon() + 1;
        continue;
      }
      return s.truncated(maxQ);
    }
    fail(ErrorCode::NonUnitLeading, "expression precision could not be reached");
  }

  std::string to_string() const { return print(false); }

private:
  explicit EtaExpr(Kind k) : kind_(k) {}

  WSeries expand_at(const Rational &H) const {
    switch (kind_) {
    case Kind::Number: return WSeries::constant(WPoly(value_));
    case Kind::Eta: {
      EtaQuotient q;
      q.factors[M_] = exp_;
      return to_w(quotient_expand(q, H));
    }
    case Kind::G2: return g2_expand(M_, H, false);
    case Kind::G2s: return g2_expand(M_, H, true);
    case Kind::Power: return kids_[0].expand_at(H).pow(exp_);
    case Kind::Sum: {
      WSeries s;
      for (std::size_t i = 0; i < kids_.size(); ++i) {
        WSeries t = kids_[i].expand_at(H);
        s = signs_[i] < 0 ? s - t : s + t;
      }
      return s;
    }
    case Kind::Product: {
      // eta factors are combined into one quotient, expanded in a single pass
      EtaQuotient q;
      bool anyEta = false;
      WSeries rest = WSeries::constant(WPoly(1));
      auto absorb = [&](const EtaExpr &k, int sgn) {
        if (k.kind_ == Kind::Eta) {
          q.factors[k.M_] += sgn * k.exp_;
          anyEta = true;
        } else if (k.kind_ == Kind::Number) {
          if (sgn < 0 && k.value_ == 0) fail(ErrorCode::NonUnitLeading, "division by zero in expression");
          q.scalar *= sgn > 0 ? k.value_ : Rational(1 / k.value_);
        } else {
          WSeries t = k.expand_at(H);
          rest = sgn > 0 ? rest * t : rest / t;
        }
      };
      for (const auto &k : kids_) absorb(k, 1);
      for (const auto &k : den_) absorb(k, -1);
      std::erase_if(q.factors, [](const auto &p) { return p.second == 0; });
      if (!anyEta || q.factors.empty()) return rest.scaled(WPoly(q.scalar));
      return to_w(quotient_expand(q, H)) * rest;
    }
    }
    return WSeries();
  }

  std::string print(bool inProduct) const {
    switch (kind_) {
    case Kind::Number: return format_rational_short(value_);
    case Kind::Eta: return "e" + std::to_string(M_) + (exp_ == 1 ? "" : "^" + std::to_string(exp_));
    case Kind::G2: return "G2[" + std::to_string(M_) + "]";
    case Kind::G2s: return "G2s[" + std::to_string(M_) + "]";
    case Kind::Power: return "(" + kids_[0].print(false) + ")^" + std::to_string(exp_);
    case Kind::Sum: {
      std::string s;
      for (std::size_t i = 0; i < kids_.size(); ++i) {
        if (i) s += signs_[i] < 0 ? " - " : " + ";
        else if (signs_[i] < 0) s += "-";
        s += kids_[i].print(true);
      }
      return inProduct && kids_.size() > 1 ? "(" + s + ")" : s;
    }
    case Kind::Product: {
      std::string s;
      for (const auto &k : kids_) s += (s.empty() ? "" : "*") + k.print(true);
      if (s.empty()) s = "1";
      if (!den_.empty()) {
        std::string d;
        for (const auto &k : den_) d += (d.empty() ? "" : "*") + k.print(true);
        s += den_.size() > 1 ? "/(" + d + ")" : "/" + d;
      }
      return s;
    }
    }
    return {};
  }

  Kind kind_;
  Rational value_;
  long long M_ = 0;
  int exp_ = 1;
  std::vector<int> signs_;
  std::vector<EtaExpr> kids_, den_;
};

namespace detail {

class EtaParser {
public:
  explicit EtaParser(std::string_view text) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) s_.push_back(c);
  }

  EtaExpr parse() {
    if (s_.empty()) error("empty expression");
    EtaExpr e = expr();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void error(const std::string &msg) const {
    fail(ErrorCode::ParseError, "eta expression at position " + std::to_string(pos_) + ": " + msg);
  }
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }
  long long integer() {
    std::size_t start = pos_;
    bool neg = accept('-');
    if (!neg) accept('+');
    std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      error("expected integer");
    }
    if (pos_ - digits > 15) error("integer too large");
    long long v = std::stoll(s_.substr(digits, pos_ - digits));
    return neg ? -v : v;
  }
  long long positive() {
    long long v = integer();
    if (v < 1) error("multiplier must be positive");
    return v;
  }

  EtaExpr expr() {
    std::vector<std::pair<int, EtaExpr>> terms;
    int sgn = 1;
    if (accept('-')) sgn = -1;
    else accept('+');
    terms.emplace_back(sgn, term());
    while (true) {
      if (accept('+')) terms.emplace_back(1, term());
      else if (accept('-')) terms.emplace_back(-1, term());
      else break;
    }
    if (terms.size() == 1 && terms[0].first == 1) return std::move(terms[0].second);
    return EtaExpr::sum(std::move(terms));
  }

  EtaExpr term() {
    std::vector<EtaExpr> num, den;
    num.push_back(factor());
    while (true) {
      if (accept('*')) num.push_back(factor());
      else if (accept('/')) den.push_back(factor());
      else break;
    }
    if (num.size() == 1 && den.empty()) return std::move(num[0]);
    return EtaExpr::product(std::move(num), std::move(den));
  }

  EtaExpr factor() {
    if (pos_ >= s_.size()) error("unexpected end");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return EtaExpr::number(make_rational(integer()));
    if (c == 'e') {
      ++pos_;
      long long M = positive();
      int k = 1;
      if (accept('^')) k = static_cast<int>(integer());
      return EtaExpr::eta(M, k);
    }
    if (s_.compare(pos_, 4, "G2s[") == 0 || s_.compare(pos_, 3, "G2[") == 0) {
      bool completed = s_[pos_ + 2] == 's';
      pos_ += completed ? 4 : 3;
      long long M = positive();
      expect(']');
      return EtaExpr::g2(M, completed);
    }
    if (accept('(')) {
      EtaExpr e = expr();
      expect(')');
      if (accept('^')) return EtaExpr::power(std::move(e), static_cast<int>(integer()));
      return e;
    }
    error("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

} // namespace detail

inline EtaExpr parse_eta_expr(std::string_view text) { return detail::EtaParser(text).parse(); }

} // namespace indef_theta
