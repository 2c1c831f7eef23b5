#pragma once

#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

// Dense row-major matrices over an arbitrary ordered field. Everything here
// runs on tiny matrices (dimensions are n, p, q of the algebra), so plain
// Gaussian elimination with partial pivoting is all we need. With S=Rational
// the eliminations are exact.
template <class S>
using Mat = std::vector<Vector<S>>;

namespace linalg {

template <class S>
Mat<S> zeros(int rows, int cols) {
  return Mat<S>(static_cast<std::size_t>(rows), vec::zero<S>(cols));
}

template <class S>
Mat<S> identity(int n) {
  Mat<S> m = zeros<S>(n, n);
  for (int i = 0; i < n; ++i) m[i][i] = S(1);
  return m;
}

template <class S>
Vector<S> mat_vec(const Mat<S>& a, const Vector<S>& x) {
  Vector<S> r;
  r.reserve(a.size());
  for (const auto& row : a) r.push_back(vec::dot(row, x));
  return r;
}

template <class S>
Mat<S> transpose(const Mat<S>& a) {
  if (a.empty()) return {};
  Mat<S> t = zeros<S>(static_cast<int>(a[0].size()), static_cast<int>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

template <class S>
Mat<S> mat_mul(const Mat<S>& a, const Mat<S>& b) {
  const std::size_t rows = a.size(), inner = b.size(), cols = b.empty() ? 0 : b[0].size();
  Mat<S> r = zeros<S>(static_cast<int>(rows), static_cast<int>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      const S& aik = a[i][k];
      if (ScalarOps<S>::is_zero(aik)) continue;
      for (std::size_t j = 0; j < cols; ++j) r[i][j] += aik * b[k][j];
    }
  return r;
}

// Row echelon reduction in place; returns pivot column list.
template <class S>
std::vector<int> row_reduce(Mat<S>& m, const S& eps) {
  std::vector<int> pivots;
  const int rows = static_cast<int>(m.size());
  const int cols = rows ? static_cast<int>(m[0].size()) : 0;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = -1;
    S best_abs(0);
    for (int i = r; i < rows; ++i) {
      S a = ScalarOps<S>::abs(m[i][c]);
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best < 0 || best_abs <= eps) continue;
    std::swap(m[r], m[best]);
    const S inv = S(1) / m[r][c];
    for (int j = c; j < cols; ++j) m[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      const S f = m[i][c];
      if (ScalarOps<S>::is_zero(f, eps)) continue;
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

template <class S>
int rank(Mat<S> m, const S& eps) {
  return static_cast<int>(row_reduce(m, eps).size());
}

// Solves A x = b for square invertible A; returns false when singular.
template <class S>
bool solve_square(Mat<S> a, Vector<S> b, Vector<S>& out, const S& eps) {
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i) a[i].push_back(b[i]);
  auto pivots = row_reduce(a, eps);
  if (static_cast<int>(pivots.size()) != n) return false;
  for (int i = 0; i < n; ++i)
    if (pivots[i] != i) return false;
  out = vec::zero<S>(n);
  for (int i = 0; i < n; ++i) out[i] = a[i][n];
  return true;
}

// Kernel basis of A (solutions of A x = 0), via reduced echelon form.
template <class S>
std::vector<Vector<S>> kernel_basis(Mat<S> a, const S& eps) {
  const int cols = a.empty() ? 0 : static_cast<int>(a[0].size());
  auto pivots = row_reduce(a, eps);
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (int c : pivots) is_pivot[static_cast<std::size_t>(c)] = true;
  std::vector<Vector<S>> basis;
  for (int free = 0; free < cols; ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    Vector<S> v = vec::zero<S>(cols);
    v[static_cast<std::size_t>(free)] = S(1);
    for (std::size_t r = 0; r < pivots.size(); ++r)
      v[static_cast<std::size_t>(pivots[r])] = -a[r][static_cast<std::size_t>(free)];
    basis.push_back(std::move(v));
  }
  return basis;
}

// Minimum-Euclidean-norm solution of A x = b for A with full row rank:
// x = A^T (A A^T)^{-1} b. Exact over the rationals.
template <class S>
Vector<S> least_norm_solve(const Mat<S>& a, const Vector<S>& b, const S& eps) {
  Mat<S> at = transpose(a);
  Mat<S> gram = mat_mul(a, at);
  Vector<S> y;
  require(solve_square(gram, b, y, eps), ErrorCode::InfeasibleFiber,
          "least-norm solve: Gram matrix singular (row rank deficient)");
  return mat_vec(at, y);
}

// Exact determinant by fraction-free-ish elimination (fine at these sizes).
template <class S>
S determinant(Mat<S> m, const S& eps) {
  const int n = static_cast<int>(m.size());
  S det(1);
  for (int c = 0; c < n; ++c) {
    int best = -1;
    S best_abs(0);
    for (int i = c; i < n; ++i) {
      S a = ScalarOps<S>::abs(m[i][c]);
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (best < 0 || best_abs <= eps) return S(0);
    if (best != c) {
      std::swap(m[c], m[best]);
      det = -det;
    }
    det *= m[c][c];
    const S inv = S(1) / m[c][c];
    for (int i = c + 1; i < n; ++i) {
      const S f = m[i][c] * inv;
      if (ScalarOps<S>::is_zero(f, eps)) continue;
      for (int j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

}  // namespace linalg
}  // namespace carnot
