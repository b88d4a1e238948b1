#pragma once

// Dense Gaussian elimination over an ordered field. The exact backend pivots
// on the first nonzero entry; the float backend uses partial pivoting and
// treats pivots below 1e-12 (relative to the largest entry) as zero.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mahler/scalar.hpp"

namespace mahler {

template <Scalar S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, S(0)) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  // Rows given as vectors.
  static Matrix from_rows(const std::vector<Vector<S>>& rows) {
    Matrix m(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows_; ++i)
      for (int j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    return m;
  }
  static Matrix from_columns(const std::vector<Vector<S>>& cols) { return from_rows(cols).transposed(); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  S& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const S& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }

  Vector<S> row(int i) const { return Vector<S>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_); }
  Vector<S> column(int j) const {
    Vector<S> c(rows_);
    for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Vector<S> operator*(const Vector<S>& v) const {
    Vector<S> r(rows_, S(0));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  Matrix operator*(const Matrix& o) const {
    Matrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        if (is_zero((*this)(i, k))) continue;
        for (int j = 0; j < o.cols_; ++j) r(i, j) += (*this)(i, k) * o(k, j);
      }
    return r;
  }

  bool operator==(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (std::size_t i = 0; i < data_.size(); ++i)
      if (!approx_equal(data_[i], o.data_[i])) return false;
    return true;
  }

  std::vector<Vector<S>> rows_as_vectors() const {
    std::vector<Vector<S>> r;
    for (int i = 0; i < rows_; ++i) r.push_back(row(i));
    return r;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<S> data_;
};

namespace detail {

template <Scalar S>
double pivot_floor(const Matrix<S>& m) {
  if constexpr (is_exact_v<S>) {
    return 0.0;
  } else {
    double mx = 0;
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) mx = std::max(mx, std::abs(m(i, j)));
    return 1e-12 * std::max(mx, 1.0);
  }
}

// Picks the pivot row for column `col` among rows [from, rows); -1 if none.
template <Scalar S>
int choose_pivot(const Matrix<S>& m, int from, int col, double floor) {
  if constexpr (is_exact_v<S>) {
    for (int r = from; r < m.rows(); ++r)
      if (sgn(m(r, col)) != 0) return r;
    return -1;
  } else {
    int best = -1;
    double bv = floor;
    for (int r = from; r < m.rows(); ++r) {
      double v = std::abs(m(r, col));
      if (v > bv) {
        bv = v;
        best = r;
      }
    }
    return best;
  }
}

template <Scalar S>
void swap_rows(Matrix<S>& m, int a, int b) {
  if (a == b) return;
  for (int j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}

// Reduced row echelon form in place; returns pivot columns.
template <Scalar S>
std::vector<int> rref(Matrix<S>& m) {
  const double floor = pivot_floor(m);
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int p = choose_pivot(m, r, c, floor);
    if (p < 0) continue;
    swap_rows(m, r, p);
    S inv = S(1) / m(r, c);
    for (int j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == r || is_zero(m(i, c))) continue;
      S f = m(i, c);
      for (int j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace detail

template <Scalar S>
S determinant(Matrix<S> m) {
  const int n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  const double floor = detail::pivot_floor(m);
  S det = 1;
  for (int c = 0; c < n; ++c) {
    int p = detail::choose_pivot(m, c, c, floor);
    if (p < 0) return S(0);
    if (p != c) {
      detail::swap_rows(m, c, p);
      det = -det;
    }
    det *= m(c, c);
    for (int i = c + 1; i < n; ++i) {
      if (is_zero(m(i, c))) continue;
      S f = m(i, c) / m(c, c);
      for (int j = c + 1; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

template <Scalar S>
S determinant_of_columns(const std::vector<Vector<S>>& cols) { return determinant(Matrix<S>::from_columns(cols)); }

// Unique solution of A x = b, or nullopt when A is singular.
template <Scalar S>
std::optional<Vector<S>> solve(const Matrix<S>& a, const Vector<S>& b) {
  const int n = a.rows();
  Matrix<S> aug(n, n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  const double floor = detail::pivot_floor(a);
  for (int c = 0; c < n; ++c) {
    int p = detail::choose_pivot(aug, c, c, floor);
    if (p < 0) return std::nullopt;
    detail::swap_rows(aug, c, p);
    for (int i = c + 1; i < n; ++i) {
      if (is_zero(aug(i, c))) continue;
      S f = aug(i, c) / aug(c, c);
      for (int j = c + 1; j <= n; ++j) aug(i, j) -= f * aug(c, j);
    }
  }
  Vector<S> x(n);
  for (int i = n - 1; i >= 0; --i) {
    S s = aug(i, n);
    for (int j = i + 1; j < n; ++j) s -= aug(i, j) * x[j];
    x[i] = s / aug(i, i);
  }
  return x;
}

template <Scalar S>
std::optional<Matrix<S>> inverse(const Matrix<S>& a) {
  const int n = a.rows();
  Matrix<S> aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  auto piv = detail::rref(aug);
  if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) return std::nullopt;
  Matrix<S> inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

template <Scalar S>
int rank(const std::vector<Vector<S>>& vectors) {
  if (vectors.empty()) return 0;
  Matrix<S> m = Matrix<S>::from_rows(vectors);
  return static_cast<int>(detail::rref(m).size());
}

// Dimension of the affine hull of a point set (-1 for the empty set).
template <Scalar S>
int affine_dimension(const std::vector<Vector<S>>& points) {
  if (points.empty()) return -1;
  std::vector<Vector<S>> diffs;
  for (std::size_t i = 1; i < points.size(); ++i) diffs.push_back(points[i] - points[0]);
  return rank(diffs);
}

// Basis of {x : M x = 0}.
template <Scalar S>
std::vector<Vector<S>> nullspace(const Matrix<S>& m_in) {
  Matrix<S> m = m_in;
  auto piv = detail::rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : piv) is_pivot[c] = true;
  std::vector<Vector<S>> basis;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    Vector<S> v(m.cols(), S(0));
    v[free] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m(static_cast<int>(r), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Basis of the orthogonal complement of span(vectors) in R^n.
template <Scalar S>
std::vector<Vector<S>> orthogonal_complement(const std::vector<Vector<S>>& vectors, int n) {
  if (vectors.empty()) {
    std::vector<Vector<S>> basis;
    for (int j = 0; j < n; ++j) basis.push_back(unit_vector<S>(n, j));
    return basis;
  }
  return nullspace(Matrix<S>::from_rows(vectors));
}

}  // namespace mahler
