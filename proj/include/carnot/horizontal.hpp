#pragma once

#include <utility>

#include "carnot/norm.hpp"

namespace carnot {

// A bracket-generating subspace V of the algebra given by an n x q basis
// matrix, together with a norm on the V-coordinates. The polarized case
// (V = V_inf with the standard basis) is the common one; a general V is what
// distinguishes the metric d from its asymptotic-cone metric d_inf.
template <class S>
class HorizontalSpace {
 public:
  using AlgebraHandle = typename NilpotentAlgebra<S>::Handle;

  static HorizontalSpace standard(AlgebraHandle alg, Norm<S> norm) {
    const int p = alg->horizontal_dim();
    require(norm.dim() == p, ErrorCode::DimensionMismatch,
            "norm dimension must equal the horizontal dimension");
    Mat<S> cols;
    for (int j = 0; j < p; ++j) {
      Vector<S> c = vec::zero<S>(alg->dim());
      c[static_cast<std::size_t>(j)] = S(1);
      cols.push_back(std::move(c));
    }
    return HorizontalSpace(std::move(alg), std::move(cols), std::move(norm));
  }

  HorizontalSpace(AlgebraHandle alg, Mat<S> basis_columns, Norm<S> norm)
      : alg_(std::move(alg)), cols_(std::move(basis_columns)), norm_(std::move(norm)) {
    const int n = alg_->dim();
    const int p = alg_->horizontal_dim();
    q_ = static_cast<int>(cols_.size());
    require(q_ >= 1, ErrorCode::BadDimensions, "horizontal space needs at least one column");
    require(norm_.dim() == q_, ErrorCode::DimensionMismatch,
            "norm dimension must equal the number of basis columns");
    for (const auto& c : cols_)
      require(static_cast<int>(c.size()) == n, ErrorCode::DimensionMismatch,
              "basis column has wrong dimension");
    // pi restricted to V must be onto V_inf: top p x q block has rank p.
    top_ = linalg::zeros<S>(p, q_);
    for (int j = 0; j < q_; ++j)
      for (int i = 0; i < p; ++i) top_[i][j] = cols_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    require(linalg::rank(top_, rank_tol()) == p, ErrorCode::InvalidArgument,
            "pi restricted to V is not surjective onto V_inf");
  }

  const AlgebraHandle& algebra() const { return alg_; }
  const Norm<S>& norm() const { return norm_; }
  int q() const { return q_; }
  bool standard_basis() const {
    if (q_ != alg_->horizontal_dim()) return false;
    for (int j = 0; j < q_; ++j)
      for (int i = 0; i < alg_->dim(); ++i) {
        const S want = (i == j) ? S(1) : S(0);
        if (cols_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] != want) return false;
      }
    return true;
  }

  // V-coordinates -> algebra coordinates.
  Vector<S> embed(const Vector<S>& coeffs) const {
    require(static_cast<int>(coeffs.size()) == q_, ErrorCode::DimensionMismatch,
            "expected a q-vector");
    Vector<S> r = vec::zero<S>(alg_->dim());
    for (int j = 0; j < q_; ++j) {
      const S& c = coeffs[static_cast<std::size_t>(j)];
      if (ScalarOps<S>::is_zero(c)) continue;
      for (int i = 0; i < alg_->dim(); ++i) r[static_cast<std::size_t>(i)] += c * cols_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }
    return r;
  }

  // pi of an embedded coefficient vector.
  Vector<S> project_coeffs(const Vector<S>& coeffs) const {
    return linalg::mat_vec(top_, coeffs);
  }

  // The norm on V_inf whose unit ball is pi(B(1)): the gauge of the projected
  // ball, i.e. min{ ||v|| : v in V, pi(v) = w }. Exact LPs for the polyhedral
  // kinds, a least-norm solve for l2.
  S projected_norm(const Vector<S>& w) const {
    return lift_impl(w).first;
  }

  // Minimal lift: coefficients of Y in V with pi(Y) = w, ||Y|| minimal.
  Vector<S> lift_min_norm(const Vector<S>& w) const {
    return lift_impl(w).second;
  }

  S length_of(const Vector<S>& coeffs) const { return norm_.eval(coeffs); }

 private:
  static S rank_tol() {
    if constexpr (std::is_same_v<S, double>)
      return 1e-10;
    else
      return S(0);
  }

  std::pair<S, Vector<S>> lift_impl(const Vector<S>& w) const {
    const int p = alg_->horizontal_dim();
    require(static_cast<int>(w.size()) == p, ErrorCode::DimensionMismatch,
            "expected a p-vector");
    bool zero = true;
    for (const auto& x : w)
      if (!ScalarOps<S>::is_zero(x)) {
        zero = false;
        break;
      }
    if (zero) return {S(0), vec::zero<S>(q_)};

    switch (norm_.kind()) {
      case Norm<S>::Kind::L2: {
        Vector<S> coeffs = linalg::least_norm_solve(top_, w, rank_tol());
        return {norm_.eval(coeffs), std::move(coeffs)};
      }
      case Norm<S>::Kind::L1: {
        // min sum(c+ + c-)  s.t.  P(c+ - c-) = w.
        Mat<S> a = linalg::zeros<S>(p, 2 * q_);
        for (int i = 0; i < p; ++i)
          for (int j = 0; j < q_; ++j) {
            a[i][j] = top_[i][j];
            a[i][q_ + j] = -top_[i][j];
          }
        Vector<S> c(static_cast<std::size_t>(2 * q_), S(1));
        auto r = lp_solve_eq<S>(a, w, c, lp_eps_scalar());
        require(r.feasible, ErrorCode::InfeasibleFiber, "projected-norm fiber LP infeasible");
        require(r.optimal(), ErrorCode::NoConvergence, "projected-norm LP stalled");
        Vector<S> coeffs = vec::zero<S>(q_);
        for (int j = 0; j < q_; ++j) coeffs[static_cast<std::size_t>(j)] = r.x[static_cast<std::size_t>(j)] - r.x[static_cast<std::size_t>(q_ + j)];
        return {r.value, std::move(coeffs)};
      }
      case Norm<S>::Kind::Linf: {
        // min t  s.t.  P(c+ - c-) = w,  c+_j + c-_j + s_j = t.
        // Variables: c+ (q), c- (q), s (q), t (1).
        const int nv = 3 * q_ + 1;
        Mat<S> a = linalg::zeros<S>(p + q_, nv);
        Vector<S> b = vec::zero<S>(p + q_);
        for (int i = 0; i < p; ++i) {
          for (int j = 0; j < q_; ++j) {
            a[i][j] = top_[i][j];
            a[i][q_ + j] = -top_[i][j];
          }
          b[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)];
        }
        for (int j = 0; j < q_; ++j) {
          a[p + j][j] = S(1);
          a[p + j][q_ + j] = S(1);
          a[p + j][2 * q_ + j] = S(1);
          a[p + j][3 * q_] = S(-1);
        }
        Vector<S> c = vec::zero<S>(nv);
        c[static_cast<std::size_t>(3 * q_)] = S(1);
        auto r = lp_solve_eq<S>(a, b, c, lp_eps_scalar());
        require(r.feasible, ErrorCode::InfeasibleFiber, "projected-norm fiber LP infeasible");
        require(r.optimal(), ErrorCode::NoConvergence, "projected-norm LP stalled");
        Vector<S> coeffs = vec::zero<S>(q_);
        for (int j = 0; j < q_; ++j) coeffs[static_cast<std::size_t>(j)] = r.x[static_cast<std::size_t>(j)] - r.x[static_cast<std::size_t>(q_ + j)];
        return {r.value, std::move(coeffs)};
      }
      case Norm<S>::Kind::Polytope: {
        // min sum(lambda)  s.t.  (P V) lambda = w, lambda >= 0.
        const auto& verts = norm_.polytope_vertices();
        const int nv = static_cast<int>(verts.size());
        Mat<S> a = linalg::zeros<S>(p, nv);
        for (int j = 0; j < nv; ++j) {
          Vector<S> pv = linalg::mat_vec(top_, verts[static_cast<std::size_t>(j)]);
          for (int i = 0; i < p; ++i) a[i][j] = pv[static_cast<std::size_t>(i)];
        }
        Vector<S> c(static_cast<std::size_t>(nv), S(1));
        auto r = lp_solve_eq<S>(a, w, c, lp_eps_scalar());
        require(r.feasible, ErrorCode::InfeasibleFiber, "projected-norm fiber LP infeasible");
        require(r.optimal(), ErrorCode::NoConvergence, "projected-norm LP stalled");
        Vector<S> coeffs = vec::zero<S>(q_);
        for (int j = 0; j < nv; ++j) {
          const S& lam = r.x[static_cast<std::size_t>(j)];
          if (ScalarOps<S>::is_zero(lam)) continue;
          for (int k = 0; k < q_; ++k) coeffs[static_cast<std::size_t>(k)] += lam * verts[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        }
        return {r.value, std::move(coeffs)};
      }
    }
    fail(ErrorCode::InvalidArgument, "unknown norm kind");
  }

  static S lp_eps_scalar() {
    if constexpr (std::is_same_v<S, double>)
      return 1e-11;
    else
      return S(0);
  }

  AlgebraHandle alg_;
  Mat<S> cols_;   // q columns, each an n-vector
  Mat<S> top_;    // p x q block of pi restricted to V
  Norm<S> norm_;
  int q_ = 0;
};

using SpaceD = HorizontalSpace<double>;
using SpaceQ = HorizontalSpace<Rational>;

// Minimal-norm lift of pi(g); Y_g in V-coordinates.
template <class S>
Vector<S> lift_min_norm(const HorizontalSpace<S>& h, const GroupElement<S>& g) {
  return h.lift_min_norm(project_pi(g));
}

}  // namespace carnot
