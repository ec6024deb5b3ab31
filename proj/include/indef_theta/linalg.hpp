#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace indef_theta {

template <class T> class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T &fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto &row : init) {
      if (row.size() != cols_) fail(ErrorCode::DimensionMismatch, "ragged matrix literal");
      for (const auto &x : row) data_.push_back(x);
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<T>> &rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) fail(ErrorCode::DimensionMismatch, "ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }
  std::vector<T> col(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_symmetric() const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  friend bool operator==(const Matrix &a, const Matrix &b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend Matrix operator*(const Matrix &a, const Matrix &b) {
    if (a.cols_ != b.rows_) fail(ErrorCode::DimensionMismatch, "matrix product shapes");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k) == T(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
      }
    return c;
  }

  friend std::vector<T> operator*(const Matrix &a, const std::vector<T> &v) {
    if (a.cols_ != v.size()) fail(ErrorCode::DimensionMismatch, "matrix-vector shapes");
    std::vector<T> r(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) r[i] += a(i, j) * v[j];
    return r;
  }

  Matrix operator*(const T &s) const {
    Matrix r = *this;
    for (auto &x : r.data_) x *= s;
    return r;
  }

  friend Matrix operator-(const Matrix &a, const Matrix &b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) fail(ErrorCode::DimensionMismatch, "matrix difference shapes");
    Matrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] -= b.data_[i];
    return r;
  }

  friend Matrix operator+(const Matrix &a, const Matrix &b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) fail(ErrorCode::DimensionMismatch, "matrix sum shapes");
    Matrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] += b.data_[i];
    return r;
  }

  template <class U> Matrix<U> cast() const {
    Matrix<U> r(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = convert<U>((*this)(i, j));
    return r;
  }

private:
  template <class U> static U convert(const T &x) {
    if constexpr (std::is_same_v<U, Rational> && std::is_integral_v<T>) return make_rational(x);
    else if constexpr (std::is_same_v<U, double> && std::is_same_v<T, Rational>) return x.get_d();
    else return static_cast<U>(x);
  }

  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using RMatrix = Matrix<Rational>;
using IMatrix = Matrix<long long>;

template <class T> std::string format_matrix(const Matrix<T> &m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    s += i ? ",[" : "[";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) s += ",";
      if constexpr (std::is_same_v<T, Rational>) s += format_rational_short(m(i, j));
      else s += std::to_string(m(i, j));
    }
    s += "]";
  }
  return s + "]";
}

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(RMatrix &m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(RMatrix m) { return rref(m).size(); }

/// Basis of the right nullspace {x : m x = 0}.
inline std::vector<RationalVector> nullspace(RMatrix m) {
  auto pivots = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    RationalVector x(m.cols(), Rational(0));
    x[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m(r, free);
    basis.push_back(std::move(x));
  }
  return basis;
}

/// Solves m x = b for square nonsingular m; nullopt if singular.
inline std::optional<RationalVector> solve(const RMatrix &m, const RationalVector &b) {
  if (!m.square() || m.rows() != b.size()) fail(ErrorCode::DimensionMismatch, "solve shapes");
  std::size_t n = m.rows();
  RMatrix aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n) = b[i];
  }
  auto pivots = rref(aug);
  if (pivots.size() < n || pivots.back() >= n) return std::nullopt;
  RationalVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug(i, n);
  return x;
}

inline std::optional<RMatrix> inverse(const RMatrix &m) {
  if (!m.square()) fail(ErrorCode::DimensionMismatch, "inverse of non-square matrix");
  std::size_t n = m.rows();
  RMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  auto pivots = rref(aug);
  if (pivots.size() < n || pivots[n - 1] >= n) return std::nullopt;
  RMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

inline Rational determinant(RMatrix m) {
  if (!m.square()) fail(ErrorCode::DimensionMismatch, "determinant of non-square matrix");
  std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(p, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m(i, c) == 0) continue;
      Rational f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

struct Inertia {
  std::size_t positive = 0, negative = 0, zero = 0;
};

/// Exact inertia of a symmetric rational matrix by congruence (LDL^T with
/// symmetric pivoting). A zero diagonal with a nonzero off-diagonal entry
/// (i,j) is repaired by adding row/col j to row/col i.
inline Inertia inertia(RMatrix m) {
  if (!m.is_symmetric()) fail(ErrorCode::NotSymmetric, "inertia of non-symmetric matrix");
  std::size_t n = m.rows();
  Inertia in;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m(p, p) == 0) ++p;
    if (p == n) {
      std::optional<std::pair<std::size_t, std::size_t>> off;
      for (std::size_t i = k; i < n && !off; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (m(i, j) != 0) {
            off = {i, j};
            break;
          }
      if (!off) {
        in.zero += n - k;
        return in;
      }
      auto [i, j] = *off;
      for (std::size_t t = 0; t < n; ++t) m(i, t) += m(j, t);
      for (std::size_t t = 0; t < n; ++t) m(t, i) += m(t, j);
      p = i;
    }
    if (p != k) {
      for (std::size_t t = 0; t < n; ++t) std::swap(m(p, t), m(k, t));
      for (std::size_t t = 0; t < n; ++t) std::swap(m(t, p), m(t, k));
    }
    Rational d = m(k, k);
    (d > 0 ? in.positive : in.negative)++;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rational f = m(i, k) / d;
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
    for (std::size_t i = k + 1; i < n; ++i) m(k, i) = m(i, k) = 0;
  }
  return in;
}

/// Plain LDL^T pivots without pivoting; all positive iff positive definite.
inline std::optional<RationalVector> ldl_pivots(RMatrix m) {
  std::size_t n = m.rows();
  RationalVector d(n);
  for (std::size_t k = 0; k < n; ++k) {
    d[k] = m(k, k);
    if (d[k] == 0) return std::nullopt;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rational f = m(i, k) / d[k];
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return d;
}

inline bool is_positive_definite(const RMatrix &m) {
  if (!m.is_symmetric()) return false;
  auto d = ldl_pivots(m);
  if (!d) return false;
  for (const auto &x : *d)
    if (x <= 0) return false;
  return true;
}

} // namespace indef_theta
