#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "carnot/norm.hpp"

namespace carnot {

// PMP state for the time-optimal problem on a polarized 2-step group:
// base point x (exponential coordinates), covector xi, abnormal multiplier
// nu (0 or -1 after normalization).
struct ExtremalState {
  VecD x;
  VecD xi;
  double nu = -1.0;
  double t = 0.0;
};

// h_i(lambda) = <lambda, X_i(x)> = xi_i + 1/2 sum_{j,k>p} x_j xi_k c_{ji}^k.
inline VecD horizontal_momenta(const AlgebraD& alg, const VecD& x, const VecD& xi) {
  VecD h(static_cast<std::size_t>(alg.horizontal_dim()));
  for (int i = 0; i < alg.horizontal_dim(); ++i) h[static_cast<std::size_t>(i)] = xi[static_cast<std::size_t>(i)];
  for (const auto& t : alg.terms())
    h[static_cast<std::size_t>(t.j)] += 0.5 * x[static_cast<std::size_t>(t.i)] * xi[static_cast<std::size_t>(t.k)] * t.c;
  return h;
}

inline VecD horizontal_momenta(const AlgebraD& alg, const ExtremalState& s) {
  return horizontal_momenta(alg, s.x, s.xi);
}

struct TrajectoryPoint {
  double t;
  VecD x;
  VecD xi;
  VecD u;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  double duration = 0.0;
  int switch_count = 0;  // bang-bang control changes
};

namespace detail {

// Time derivative of (x, xi) under control u (p-vector):
//   xdot_i   = u_i                          (i <= p)
//   xdot_k   = 1/2 sum x_j u_i c_{ji}^k     (k > p)
//   xidot_j  = -1/2 sum xi_k u_i c_{ji}^k   (j <= p; central xi constant)
inline void pmp_derivative(const AlgebraD& alg, const VecD& x, const VecD& xi, const VecD& u,
                           VecD& dx, VecD& dxi) {
  const int n = alg.dim();
  const int p = alg.horizontal_dim();
  dx.assign(static_cast<std::size_t>(n), 0.0);
  dxi.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < p; ++i) dx[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)];
  for (const auto& t : alg.terms()) {
    // term (a=t.i, b=t.j, k=t.k): contributes x_a u_b c to xdot_k and
    // -1/2 xi_k u_b c to xidot_a.
    dx[static_cast<std::size_t>(t.k)] += 0.5 * x[static_cast<std::size_t>(t.i)] * u[static_cast<std::size_t>(t.j)] * t.c;
    dxi[static_cast<std::size_t>(t.i)] -= 0.5 * xi[static_cast<std::size_t>(t.k)] * u[static_cast<std::size_t>(t.j)] * t.c;
  }
}

// d/ds of the momenta under constant control u: hdot_i = <xi_c, [u, e_i]>,
// constant while the control is frozen (momenta are affine on such legs).
inline VecD momenta_slope(const AlgebraD& alg, const VecD& xi, const VecD& u) {
  VecD slope(static_cast<std::size_t>(alg.horizontal_dim()), 0.0);
  for (const auto& t : alg.terms())
    slope[static_cast<std::size_t>(t.j)] += u[static_cast<std::size_t>(t.i)] * xi[static_cast<std::size_t>(t.k)] * t.c;
  return slope;
}

}  // namespace detail

// Smooth (l2-type) extremal integration: classic RK4 on (x, xi) with the
// control law u = dual_support(h). Throws MomentaVanished when a normal
// extremal runs into h = 0.
inline Trajectory integrate_smooth(const AlgebraD& alg, const NormD& norm, ExtremalState s,
                                   double T, int steps) {
  require(steps >= 1, ErrorCode::InvalidArgument, "steps must be >= 1");
  require(T >= 0.0, ErrorCode::InvalidArgument, "time must be >= 0");
  Trajectory traj;
  traj.duration = T;
  const double dt = T / steps;
  auto control = [&](const VecD& x, const VecD& xi) -> VecD {
    VecD h = horizontal_momenta(alg, x, xi);
    require(norm.dual_norm(h) > 1e-12, ErrorCode::MomentaVanished,
            "horizontal momenta vanished along a normal extremal");
    return norm.dual_support(h);
  };
  VecD x = s.x, xi = s.xi;
  VecD k1x, k1xi, k2x, k2xi, k3x, k3xi, k4x, k4xi;
  traj.points.push_back({0.0, x, xi, control(x, xi)});
  for (int step = 0; step < steps; ++step) {
    const VecD u1 = control(x, xi);
    detail::pmp_derivative(alg, x, xi, u1, k1x, k1xi);
    VecD x2 = vec::add(x, vec::scale(0.5 * dt, k1x));
    VecD xi2 = vec::add(xi, vec::scale(0.5 * dt, k1xi));
    detail::pmp_derivative(alg, x2, xi2, control(x2, xi2), k2x, k2xi);
    VecD x3 = vec::add(x, vec::scale(0.5 * dt, k2x));
    VecD xi3 = vec::add(xi, vec::scale(0.5 * dt, k2xi));
    detail::pmp_derivative(alg, x3, xi3, control(x3, xi3), k3x, k3xi);
    VecD x4 = vec::add(x, vec::scale(dt, k3x));
    VecD xi4 = vec::add(xi, vec::scale(dt, k3xi));
    detail::pmp_derivative(alg, x4, xi4, control(x4, xi4), k4x, k4xi);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += dt / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
      xi[i] += dt / 6.0 * (k1xi[i] + 2.0 * k2xi[i] + 2.0 * k3xi[i] + k4xi[i]);
    }
    const double t = dt * (step + 1);
    traj.points.push_back({t, x, xi, control(x, xi)});
  }
  return traj;
}

// Bang-bang integration for polyhedral norms. On each leg the control is a
// ball vertex and the momenta are affine in time, so switch times are exact
// roots of linear margins; between switches the state advances in closed
// form (x through one BCH factor, horizontal xi linearly).
inline Trajectory integrate_bang_bang(const AlgebraD& alg, const NormD& norm, ExtremalState s,
                                      double T, int steps) {
  require(steps >= 1, ErrorCode::InvalidArgument, "steps must be >= 1");
  require(T >= 0.0, ErrorCode::InvalidArgument, "time must be >= 0");
  const auto vertices = norm.ball_vertices();
  const int nv = static_cast<int>(vertices.size());
  Trajectory traj;
  traj.duration = T;

  VecD x = s.x, xi = s.xi;
  double t = 0.0;
  const double sample_dt = T / steps;
  int next_sample = 1;

  auto lex_less = [](const VecD& a, const VecD& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };

  // Deterministic control choice: among value-optimal vertices prefer the one
  // whose own dynamics keeps it optimal (max worst-case slope margin), then
  // lexicographic.
  auto pick_control = [&](const VecD& h) -> int {
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < nv; ++j) best = std::max(best, vec::dot(h, vertices[static_cast<std::size_t>(j)]));
    require(best > 1e-12, ErrorCode::MomentaVanished,
            "horizontal momenta vanished along a bang-bang extremal");
    const double tol = 1e-11 * (1.0 + std::fabs(best));
    std::vector<int> cands;
    for (int j = 0; j < nv; ++j)
      if (vec::dot(h, vertices[static_cast<std::size_t>(j)]) >= best - tol) cands.push_back(j);
    if (cands.size() == 1) return cands[0];
    int pick = -1;
    double pick_margin = 0.0;
    for (int j : cands) {
      const VecD slope = detail::momenta_slope(alg, xi, vertices[static_cast<std::size_t>(j)]);
      double worst = std::numeric_limits<double>::infinity();
      for (int w : cands) {
        if (w == j) continue;
        worst = std::min(worst, vec::dot(slope, vec::sub(vertices[static_cast<std::size_t>(j)], vertices[static_cast<std::size_t>(w)])));
      }
      if (pick < 0 || worst > pick_margin + 1e-15) {
        pick_margin = worst;
        pick = j;
      } else if (worst > pick_margin - 1e-15 &&
                 lex_less(vertices[static_cast<std::size_t>(j)], vertices[static_cast<std::size_t>(pick)])) {
        pick = j;
      }
    }
    return pick;
  };

  int cur = pick_control(horizontal_momenta(alg, x, xi));
  traj.points.push_back({0.0, x, xi, vertices[static_cast<std::size_t>(cur)]});

  long guard = 0;
  while (t < T - 1e-15) {
    require(++guard < 2000000, ErrorCode::NoConvergence, "bang-bang switch limit exceeded");
    const VecD& u = vertices[static_cast<std::size_t>(cur)];
    const VecD h = horizontal_momenta(alg, x, xi);
    const VecD slope = detail::momenta_slope(alg, xi, u);
    // Earliest losing crossing against any other vertex: margins are linear.
    double s_switch = std::numeric_limits<double>::infinity();
    for (int j = 0; j < nv; ++j) {
      if (j == cur) continue;
      const VecD d = vec::sub(u, vertices[static_cast<std::size_t>(j)]);
      const double m0 = vec::dot(h, d);
      const double m1 = vec::dot(slope, d);
      if (m1 >= -1e-15) continue;
      const double root = -m0 / m1;
      if (root > 1e-13) s_switch = std::min(s_switch, root);
    }
    const double t_sample = std::min(T, next_sample * sample_dt);
    const double dt = std::min({t_sample - t, s_switch, T - t});
    if (dt > 0) {
      // Exact constant-control step: one BCH factor for x, linear xi update.
      x = alg.bch(x, vec::scale(dt, alg.embed_horizontal(u)));
      VecD dxi(static_cast<std::size_t>(alg.dim()), 0.0);
      for (const auto& term : alg.terms())
        dxi[static_cast<std::size_t>(term.i)] -= 0.5 * xi[static_cast<std::size_t>(term.k)] * u[static_cast<std::size_t>(term.j)] * term.c;
      for (std::size_t i = 0; i < xi.size(); ++i) xi[i] += dt * dxi[i];
      t += dt;
    }
    if (t >= t_sample - 1e-15 && next_sample <= steps) {
      traj.points.push_back({t, x, xi, u});
      ++next_sample;
    }
    const int nxt = pick_control(horizontal_momenta(alg, x, xi));
    if (nxt != cur) {
      cur = nxt;
      ++traj.switch_count;
    }
  }
  if (traj.points.empty() || traj.points.back().t < T - 1e-12)
    traj.points.push_back({T, x, xi, vertices[static_cast<std::size_t>(cur)]});
  return traj;
}

// Unit-speed extremal integration with the control law of the maximality
// condition; dispatches on the norm's smoothness.
inline Trajectory integrate_extremal(const AlgebraD& alg, const NormD& norm, const ExtremalState& s,
                                     double T, int steps) {
  require(static_cast<int>(s.x.size()) == alg.dim() && static_cast<int>(s.xi.size()) == alg.dim(),
          ErrorCode::DimensionMismatch, "state dimension mismatch");
  if (norm.kind() == NormD::Kind::L2) return integrate_smooth(alg, norm, s, T, steps);
  return integrate_bang_bang(alg, norm, s, T, steps);
}

struct AbnormalCheck {
  bool abnormal = false;
  bool degenerate = false;  // zero-length trajectory: vacuously abnormal
  double residual = 0.0;    // max_i |h_i| over samples
};

// Lemma-style test: an extremal is abnormal iff all horizontal momenta vanish
// along it.
inline AbnormalCheck is_abnormal(const AlgebraD& alg, const Trajectory& traj, double tol = 1e-10) {
  AbnormalCheck out;
  if (traj.points.size() <= 1 || traj.duration <= 0.0) {
    out.degenerate = true;
    out.abnormal = true;
    return out;
  }
  double worst = 0.0;
  for (const auto& pt : traj.points) {
    const VecD h = horizontal_momenta(alg, pt.x, pt.xi);
    worst = std::max(worst, vec::norm_inf(h));
  }
  out.residual = worst;
  out.abnormal = worst <= tol;
  return out;
}

// Drift of the maximized Hamiltonian along a trajectory; conserved quantity
// for exact extremals.
inline double hamiltonian_drift(const AlgebraD& alg, const NormD& norm, const Trajectory& traj) {
  if (traj.points.empty()) return 0.0;
  double h0 = norm.dual_norm(horizontal_momenta(alg, traj.points.front().x, traj.points.front().xi));
  double drift = 0.0;
  for (const auto& pt : traj.points) {
    const double h = norm.dual_norm(horizontal_momenta(alg, pt.x, pt.xi));
    drift = std::max(drift, std::fabs(h - h0));
  }
  return drift;
}

// Endpoint of a trajectory as a group element.
inline ElementD trajectory_endpoint(const AlgebraD::Handle& alg, const Trajectory& traj) {
  require(!traj.points.empty(), ErrorCode::InvalidArgument, "empty trajectory");
  return ElementD(alg, traj.points.back().x);
}

}  // namespace carnot
