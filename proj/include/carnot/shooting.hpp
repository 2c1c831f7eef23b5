#pragma once

#include <Eigen/Dense>

#include "carnot/pmp.hpp"
#include "carnot/rng.hpp"

namespace carnot {

// Two-point boundary value problem for the time-optimal control system:
// find (xi0, T) so the extremal from the identity reaches the target at time
// T. Damped least squares (Levenberg-Marquardt) on the endpoint residual,
// with the covector normalized to unit maximized Hamiltonian. Multi-start
// over the central momentum scale, which sets the curvature of the
// projected trajectory and has no useful prior.
struct ShootOptions {
  int restarts = 32;
  int steps = 1024;
  int max_iterations = 60;
  double endpoint_tol = 1e-8;
  double central_lo = 1e-2;
  double central_hi = 1e2;
  std::uint64_t seed = 0x7a11;
  bool early_stop = true;  // stop once several restarts agree on the best time
};

struct ShootResult {
  bool converged = false;
  double time = std::numeric_limits<double>::infinity();
  VecD xi0;
  double residual = std::numeric_limits<double>::infinity();
  int successes = 0;
  int restarts_used = 0;
};

namespace detail {

struct ShootProblem {
  const AlgebraD* alg;
  const NormD* norm;
  VecD target;
  VecD weights;  // endpoint residual weights (central coords damped)
  int steps;

  // theta = (xi (n), T). Returns weighted endpoint residual (n entries) plus
  // the Hamiltonian normalization defect.
  bool residual(const VecD& theta, VecD& out, double& endpoint_err) const {
    const int n = alg->dim();
    VecD xi(theta.begin(), theta.begin() + n);
    const double T = std::fabs(theta[static_cast<std::size_t>(n)]);
    ExtremalState s0{vec::zero<double>(n), xi, -1.0, 0.0};
    Trajectory traj;
    try {
      traj = integrate_extremal(*alg, *norm, s0, T, steps);
    } catch (const Error&) {
      return false;  // momenta vanished or switching blow-up: infeasible start
    }
    const VecD& x = traj.points.back().x;
    out.assign(static_cast<std::size_t>(n) + 1, 0.0);
    double err2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = weights[static_cast<std::size_t>(i)] * (x[static_cast<std::size_t>(i)] - target[static_cast<std::size_t>(i)]);
      out[static_cast<std::size_t>(i)] = r;
      err2 += r * r;
    }
    VecD h0(xi.begin(), xi.begin() + alg->horizontal_dim());
    out[static_cast<std::size_t>(n)] = norm->dual_norm(h0) - 1.0;
    endpoint_err = std::sqrt(err2);
    return true;
  }
};

}  // namespace detail

inline ShootResult shoot(const AlgebraD::Handle& alg, const NormD& norm, const VecD& target,
                         const ShootOptions& opts = {}) {
  const int n = alg->dim();
  const int p = alg->horizontal_dim();
  require(static_cast<int>(target.size()) == n, ErrorCode::DimensionMismatch,
          "target dimension mismatch");

  ShootResult best;
  VecD tgt_pi(target.begin(), target.begin() + p);
  VecD tgt_c(target.begin() + p, target.end());
  const double pi_norm = vec::norm2(tgt_pi);
  const double c_norm = vec::norm2(tgt_c);
  if (pi_norm < 1e-14 && c_norm < 1e-14) {  // identity target
    best.converged = true;
    best.time = 0.0;
    best.residual = 0.0;
    best.xi0 = vec::zero<double>(n + 1);
    return best;
  }

  detail::ShootProblem prob;
  prob.alg = alg.get();
  prob.norm = &norm;
  prob.target = target;
  prob.steps = opts.steps;
  prob.weights.assign(static_cast<std::size_t>(n), 1.0);
  for (int k = p; k < n; ++k) prob.weights[static_cast<std::size_t>(k)] = 1.0 / (1.0 + std::fabs(target[static_cast<std::size_t>(k)]));

  Rng rng(opts.seed);
  const double t_guess = pi_norm + 4.0 * std::sqrt(c_norm) + 0.1;

  int stable_hits = 0;
  for (int restart = 0; restart < opts.restarts; ++restart) {
    best.restarts_used = restart + 1;
    // Initial covector: horizontal part toward pi(g) (or a deterministic
    // sweep direction for central targets), central part on a log ladder
    // with alternating sign, later restarts randomized.
    VecD xi = vec::zero<double>(n);
    if (pi_norm > 1e-12 && restart % 2 == 0) {
      for (int i = 0; i < p; ++i) xi[static_cast<std::size_t>(i)] = tgt_pi[static_cast<std::size_t>(i)] / pi_norm;
    } else {
      VecD dir = rng.unit_vector(p);
      for (int i = 0; i < p; ++i) xi[static_cast<std::size_t>(i)] = dir[static_cast<std::size_t>(i)];
    }
    const int half = std::max(1, opts.restarts / 2);
    for (int k = p; k < n; ++k) {
      double mag;
      if (restart < half) {
        const double f = half == 1 ? 0.5 : static_cast<double>(restart) / (half - 1);
        mag = opts.central_lo * std::pow(opts.central_hi / opts.central_lo, f);
      } else {
        mag = rng.log_uniform(opts.central_lo, opts.central_hi);
      }
      double sgn = target[static_cast<std::size_t>(k)] >= 0 ? 1.0 : -1.0;
      if (c_norm < 1e-14) sgn = (restart % 2 == 0) ? 1.0 : -1.0;
      xi[static_cast<std::size_t>(k)] = sgn * mag;
    }

    VecD theta(xi);
    theta.push_back(t_guess * rng.uniform(0.6, 1.6));

    VecD r;
    double err = 0.0;
    if (!prob.residual(theta, r, err)) continue;
    double lambda = 1e-3;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
      if (err <= opts.endpoint_tol) break;
      const int dim = n + 1;
      Eigen::MatrixXd J(static_cast<Eigen::Index>(r.size()), dim);
      bool fd_ok = true;
      for (int c = 0; c < dim && fd_ok; ++c) {
        VecD tp = theta;
        const double h = 1e-6 * (1.0 + std::fabs(theta[static_cast<std::size_t>(c)]));
        tp[static_cast<std::size_t>(c)] += h;
        VecD rp;
        double ep;
        if (!prob.residual(tp, rp, ep)) {
          fd_ok = false;
          break;
        }
        for (std::size_t k = 0; k < r.size(); ++k) J(static_cast<Eigen::Index>(k), c) = (rp[k] - r[k]) / h;
      }
      if (!fd_ok) break;
      Eigen::VectorXd rv(static_cast<Eigen::Index>(r.size()));
      for (std::size_t k = 0; k < r.size(); ++k) rv(static_cast<Eigen::Index>(k)) = r[k];
      Eigen::MatrixXd jtj = J.transpose() * J;
      Eigen::VectorXd jtr = J.transpose() * rv;
      bool accepted = false;
      for (int inner = 0; inner < 8; ++inner) {
        Eigen::MatrixXd damp = jtj;
        for (int d = 0; d < dim; ++d) damp(d, d) += lambda * (jtj(d, d) + 1e-12);
        Eigen::VectorXd delta = damp.ldlt().solve(-jtr);
        VecD tn = theta;
        for (int d = 0; d < dim; ++d) tn[static_cast<std::size_t>(d)] += delta(d);
        if (std::fabs(tn[static_cast<std::size_t>(n)]) < 1e-3) tn[static_cast<std::size_t>(n)] = 1e-3;
        VecD rn;
        double en;
        if (prob.residual(tn, rn, en)) {
          double old2 = 0.0, new2 = 0.0;
          for (std::size_t k = 0; k < r.size(); ++k) {
            old2 += r[k] * r[k];
            new2 += rn[k] * rn[k];
          }
          if (new2 < old2) {
            theta = tn;
            r = rn;
            err = en;
            lambda = std::max(1e-12, lambda / 3.0);
            accepted = true;
            break;
          }
        }
        lambda *= 5.0;
      }
      if (!accepted) break;
    }

    if (err <= opts.endpoint_tol) {
      const double T = std::fabs(theta[static_cast<std::size_t>(n)]);
      if (best.converged && std::fabs(T - best.time) <= 1e-7 * (1.0 + best.time)) ++stable_hits;
      if (T < best.time) {
        best.converged = true;
        best.time = T;
        best.xi0 = VecD(theta.begin(), theta.begin() + n);
        best.residual = err;
        stable_hits = 0;
      }
      ++best.successes;
      if (opts.early_stop && best.successes >= 3 && stable_hits >= 2) break;
    }
  }
  return best;
}

}  // namespace carnot
