#pragma once

#include <vector>

#include "carnot/linalg.hpp"

namespace carnot {

template <class S>
struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded, Stalled };
  Status status = Status::Infeasible;
  bool feasible = false;
  bool bounded = true;
  S value{0};
  Vector<S> x;

  bool optimal() const { return status == Status::Optimal; }
};

// Two-phase dense simplex for  min c.x  s.t.  A x = b, x >= 0,  with Bland's
// rule (no cycling). Problems here are tiny (norm gauges and fiber programs),
// so a plain tableau is the right tool; with S=Rational every pivot is exact.
template <class S>
class SimplexSolver {
 public:
  explicit SimplexSolver(S eps) : eps_(std::move(eps)) {}

  LpResult<S> solve(const Mat<S>& a, const Vector<S>& b, const Vector<S>& c) const {
    LpResult<S> res = solve_once(a, b, c);
    if (res.status != LpResult<S>::Status::Stalled) return res;
    // Degenerate cycling in floating point: retry once with a deterministic
    // cost perturbation, which breaks ties at O(1e-9) objective error.
    Vector<S> cp = c;
    if constexpr (std::is_same_v<S, double>) {
      for (std::size_t j = 0; j < cp.size(); ++j)
        cp[j] += 1e-9 * static_cast<double>(1 + (j * 7919) % 13);
    }
    res = solve_once(a, b, cp);
    if (res.optimal()) res.value = vec::dot(res.x, c);
    return res;
  }

 private:
  LpResult<S> solve_once(Mat<S> a, Vector<S> b, const Vector<S>& c) const {
    const int m = static_cast<int>(a.size());
    const int n = m ? static_cast<int>(a[0].size()) : static_cast<int>(c.size());
    for (int i = 0; i < m; ++i)
      if (b[i] < S(0)) {
        for (auto& v : a[i]) v = -v;
        b[i] = -b[i];
      }

    // Tableau with artificial variables n..n+m-1; column n+m holds the rhs.
    const int total = n + m;
    Mat<S> t = linalg::zeros<S>(m, total + 1);
    std::vector<int> basis(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) t[i][j] = a[i][j];
      t[i][n + i] = S(1);
      t[i][total] = b[i];
      basis[static_cast<std::size_t>(i)] = n + i;
    }

    LpResult<S> res;
    res.status = LpResult<S>::Status::Infeasible;

    // Phase 1: minimize the sum of artificials (originals may enter,
    // artificials never re-enter).
    Vector<S> phase1 = vec::zero<S>(total);
    for (int j = n; j < total; ++j) phase1[static_cast<std::size_t>(j)] = S(1);
    switch (optimize(t, basis, phase1, total, /*forbid_from=*/n)) {
      case OptStep::Optimal: break;
      case OptStep::Unbounded: return res;  // cannot happen
      case OptStep::Stalled: res.status = LpResult<S>::Status::Stalled; return res;
    }
    S art(0);
    for (int i = 0; i < m; ++i)
      if (basis[static_cast<std::size_t>(i)] >= n) art += t[i][static_cast<std::size_t>(total)];
    if (art > eps_) return res;  // infeasible

    // Drive leftover artificials out of the basis (degenerate rows).
    for (int i = 0; i < m; ++i) {
      if (basis[static_cast<std::size_t>(i)] < n) continue;
      int enter = -1;
      for (int j = 0; j < n; ++j)
        if (ScalarOps<S>::abs(t[i][static_cast<std::size_t>(j)]) > eps_) {
          enter = j;
          break;
        }
      if (enter >= 0) pivot(t, basis, i, enter);
      // else: redundant constraint row; the artificial stays basic at value 0.
    }

    // Phase 2 on the original costs; artificials may not re-enter.
    Vector<S> cost = vec::zero<S>(total);
    for (int j = 0; j < n; ++j) cost[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)];
    switch (optimize(t, basis, cost, n, /*forbid_from=*/n)) {
      case OptStep::Optimal: break;
      case OptStep::Unbounded:
        res.feasible = true;
        res.bounded = false;
        res.status = LpResult<S>::Status::Unbounded;
        return res;
      case OptStep::Stalled:
        res.status = LpResult<S>::Status::Stalled;
        return res;
    }

    res.feasible = true;
    res.status = LpResult<S>::Status::Optimal;
    res.x = vec::zero<S>(n);
    for (int i = 0; i < m; ++i)
      if (basis[static_cast<std::size_t>(i)] < n)
        res.x[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] = t[i][static_cast<std::size_t>(total)];
    res.value = vec::dot(res.x, c);
    return res;
  }

  enum class OptStep { Optimal, Unbounded, Stalled };

  void pivot(Mat<S>& t, std::vector<int>& basis, int row, int col) const {
    const std::size_t cols = t[0].size();
    const S inv = S(1) / t[row][static_cast<std::size_t>(col)];
    for (std::size_t j = 0; j < cols; ++j) t[row][j] *= inv;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (static_cast<int>(i) == row) continue;
      const S f = t[i][static_cast<std::size_t>(col)];
      if (ScalarOps<S>::is_zero(f, eps_)) continue;
      for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[row][j];
    }
    basis[static_cast<std::size_t>(row)] = col;
  }

  // `n_enter` limits which columns may enter.
  OptStep optimize(Mat<S>& t, std::vector<int>& basis, const Vector<S>& cost, int n_enter,
                   int forbid_from) const {
    const int m = static_cast<int>(t.size());
    const std::size_t rhs = t[0].size() - 1;
    for (long iter = 0; iter < 20000; ++iter) {
      // Reduced costs: r_j = c_j - c_B . T_j (tableau is kept in canonical form).
      int enter = -1;
      for (int j = 0; j < n_enter; ++j) {
        if (j >= forbid_from) break;
        bool basic = false;
        for (int i = 0; i < m; ++i)
          if (basis[static_cast<std::size_t>(i)] == j) {
            basic = true;
            break;
          }
        if (basic) continue;
        S r = cost[static_cast<std::size_t>(j)];
        for (int i = 0; i < m; ++i)
          r -= cost[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] * t[i][static_cast<std::size_t>(j)];
        if (r < -eps_) {
          enter = j;  // Bland: first improving index
          break;
        }
      }
      if (enter < 0) return OptStep::Optimal;
      int leave = -1;
      S best_ratio(0);
      for (int i = 0; i < m; ++i) {
        const S& aij = t[i][static_cast<std::size_t>(enter)];
        if (aij > eps_) {
          const S ratio = t[i][rhs] / aij;
          const S tie = ratio_tie_tol(best_ratio);
          if (leave < 0 || ratio < best_ratio - tie ||
              (ratio <= best_ratio + tie && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
            if (leave < 0 || ratio < best_ratio) best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return OptStep::Unbounded;
      pivot(t, basis, leave, enter);
    }
    return OptStep::Stalled;
  }

  S ratio_tie_tol(const S& ratio) const {
    if constexpr (std::is_same_v<S, double>)
      return 1e-12 * (1.0 + std::fabs(ratio));
    else
      return S(0);
  }

  S eps_;
};

template <class S>
LpResult<S> lp_solve_eq(const Mat<S>& a, const Vector<S>& b, const Vector<S>& c, const S& eps) {
  return SimplexSolver<S>(eps).solve(a, b, c);
}

inline double lp_eps() { return 1e-11; }

}  // namespace carnot
