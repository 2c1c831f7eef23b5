#pragma once

#include <optional>

#include "carnot/heisenberg.hpp"
#include "carnot/nonsingular.hpp"
#include "carnot/pathopt.hpp"
#include "carnot/shooting.hpp"

namespace carnot {

// Two-sided subFinsler distance estimate. The upper bound is always realized
// by a stored horizontal path; the lower bound combines the projection bound
// with the central-growth bound derived from the unit ball's central reach.
struct DistanceEstimate {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::string lower_method = "none";
  std::string upper_method = "none";
  std::optional<PathD> witness;
  std::optional<VecD> shooting_covector;
  double witness_endpoint_gap = std::numeric_limits<double>::infinity();
  bool lower_clamped = false;

  double gap() const { return upper - lower; }
  double mid() const { return 0.5 * (lower + upper); }
};

struct DistanceOptions {
  bool use_lower_bounds = true;
  bool use_shooting = true;
  bool use_paths = true;
  bool use_closed_form = false;  // exact h3 l1/l2 evaluators when detected
  bool want_witness = true;
  ShootOptions shoot;
  PathOptOptions path;
};

namespace detail {

// Generic Nelder-Mead minimizer over R^n.
inline VecD nelder_mead(const std::function<double(const VecD&)>& f, VecD start, double spread,
                        int iters) {
  const int n = static_cast<int>(start.size());
  std::vector<std::pair<double, VecD>> simplex;
  simplex.emplace_back(f(start), start);
  for (int i = 0; i < n; ++i) {
    VecD v = start;
    v[static_cast<std::size_t>(i)] += spread;
    simplex.emplace_back(f(v), v);
  }
  for (int it = 0; it < iters; ++it) {
    std::sort(simplex.begin(), simplex.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (simplex.back().first - simplex.front().first < 1e-14) break;
    VecD centroid = vec::zero<double>(n);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
      centroid = vec::add(centroid, simplex[i].second);
    centroid = vec::scale(1.0 / n, centroid);
    VecD refl = vec::sub(vec::scale(2.0, centroid), simplex.back().second);
    const double fr = f(refl);
    if (fr < simplex.front().first) {
      VecD expd = vec::sub(vec::scale(3.0, centroid), vec::scale(2.0, simplex.back().second));
      const double fe = f(expd);
      simplex.back() = fe < fr ? std::make_pair(fe, expd) : std::make_pair(fr, refl);
    } else if (fr < simplex[simplex.size() - 2].first) {
      simplex.back() = {fr, refl};
    } else {
      VecD contr = vec::add(vec::scale(0.5, centroid), vec::scale(0.5, simplex.back().second));
      const double fc = f(contr);
      if (fc < simplex.back().first)
        simplex.back() = {fc, contr};
      else
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          simplex[i].second = vec::scale(0.5, vec::add(simplex[i].second, simplex[0].second));
          simplex[i].first = f(simplex[i].second);
        }
    }
  }
  std::sort(simplex.begin(), simplex.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return simplex.front().second;
}

// Maximize ||central(x(1))||_2 over extremal starts; endpoints of unit-time
// unit-speed extremals lie in the closed unit ball by construction, so every
// evaluation is a certified sample of the ball's central reach. A positive
// pi_penalty restricts the search to the fiber over the identity; the
// penalty is tightened in stages so the constrained optimum is located
// accurately.
inline double extremal_central_reach(const SpaceD& space, int steps, double pi_penalty,
                                     double* best_central = nullptr,
                                     double* best_pi_norm = nullptr) {
  const auto& alg = *space.algebra();
  const int n = alg.dim();
  const int p = alg.horizontal_dim();
  auto measure = [&](const VecD& xi0, double& central, double& pi_norm) -> bool {
    ExtremalState s0{vec::zero<double>(n), xi0, -1.0, 0.0};
    try {
      Trajectory t = integrate_extremal(alg, space.norm(), s0, 1.0, steps);
      const VecD& x = t.points.back().x;
      VecD c(x.begin() + p, x.end());
      VecD pi(x.begin(), x.begin() + p);
      central = vec::norm2(c);
      pi_norm = vec::norm2(pi);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  auto objective = [&](double penalty) {
    return [&, penalty](const VecD& xi0) -> double {
      double c = 0.0, pn = 0.0;
      if (!measure(xi0, c, pn)) return 0.0;
      return -(c - penalty * pn * pn);
    };
  };

  double best_val = 0.0, best_c = 0.0, best_pi = 1.0;
  const double ladders[] = {0.25, 1.0, 3.0, 6.283185307179586, 12.0, 40.0};
  for (int hdir = 0; hdir < p; ++hdir) {
    for (int cdir = 0; cdir < n - p; ++cdir) {
      for (double lam : ladders) {
        VecD xi0 = vec::zero<double>(n);
        xi0[static_cast<std::size_t>(hdir)] = 1.0;
        xi0[static_cast<std::size_t>(p + cdir)] = lam;
        VecD arg = nelder_mead(objective(pi_penalty), xi0, 0.3, 120);
        if (pi_penalty > 0) {
          // tighten the fiber constraint around the found optimum
          arg = nelder_mead(objective(pi_penalty * 100), arg, 0.02, 150);
          arg = nelder_mead(objective(pi_penalty * 10000), arg, 0.002, 150);
        }
        double c = 0.0, pn = 0.0;
        if (!measure(arg, c, pn)) continue;
        const double val = c - pi_penalty * pn * pn;
        if (val > best_val) {
          best_val = val;
          best_c = c;
          best_pi = pn;
        }
      }
    }
  }
  if (best_central) *best_central = best_c;
  if (best_pi_norm) *best_pi_norm = best_pi;
  return best_c;
}

// Best commutator value over the central sphere: the box-path family's
// contribution to the ball's central reach (a unit-length box encloses
// r = 1/16 worth of bracket).
inline double box_central_reach(const SpaceD& space) {
  const int m = space.algebra()->central_dim();
  double best = 0.0;
  auto try_dir = [&](const VecD& dir) {
    VecD X, Y;
    double v = 0.0;
    if (pathopt_detail::best_commutator_pair(space, dir, X, Y, v)) {
      // v = <[X,Y], dir>; the actual central norm of the box endpoint is
      // ||r [X,Y]|| with r = 1/16.
      const VecD br = space.algebra()->bracket(space.embed(X), space.embed(Y));
      VecD brc = space.algebra()->central_part(br);
      best = std::max(best, vec::norm2(brc) / 16.0);
    }
  };
  if (m == 1) {
    try_dir({1.0});
    try_dir({-1.0});
  } else {
    for (const auto& d : detail::sphere_samples(m, 256)) try_dir(d);
  }
  return best;
}

}  // namespace detail

// Central reach of the unit ball: how much central coordinate a unit-length
// horizontal path can accumulate. `axis` restricts to paths with closed
// projection (the fiber over the identity), `full` is over the whole ball.
// Both invert Lemma-style quadratic growth into lower bounds
//   d(g) >= sqrt(||central(g)|| / reach),
// with `axis` valid for central targets and `full` valid everywhere.
// Closed h3 values are exact; otherwise a sound upper bound on the reach is
// used (the bracket-sum inequality ||central|| <= B_max length^2 / 4), so the
// resulting lower bounds stay valid.
struct BallReach {
  double axis = 0.0;
  double full = 0.0;
};

namespace detail {

// Sound upper bound on sup{ ||[X,Y]||_2 : ||X|| = ||Y|| = 1 }; exact vertex
// scan for polyhedral norms, a Cauchy-Schwarz aggregate for l2.
inline double commutator_sup_bound(const SpaceD& space) {
  const auto& alg = *space.algebra();
  const int q = space.q();
  if (space.norm().polyhedral()) {
    const auto verts = space.norm().ball_vertices();
    double best = 0.0;
    for (const auto& a : verts)
      for (const auto& b : verts) {
        const VecD br = alg.bracket(space.embed(a), space.embed(b));
        best = std::max(best, vec::norm2(alg.central_part(br)));
      }
    return best;
  }
  // l2: <[X,Y], e_k> = X^T C_k Y with |X^T C_k Y| <= sigma_max(C_k); summing
  // in quadrature bounds the euclidean central norm.
  double acc = 0.0;
  for (int k = 0; k < alg.central_dim(); ++k) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(q, q);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        VecD ea = vec::zero<double>(q), eb = vec::zero<double>(q);
        ea[static_cast<std::size_t>(a)] = 1.0;
        eb[static_cast<std::size_t>(b)] = 1.0;
        const VecD br = alg.bracket(space.embed(ea), space.embed(eb));
        C(a, b) = br[static_cast<std::size_t>(alg.horizontal_dim() + k)];
      }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
    const double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    acc += s * s;
  }
  return std::sqrt(acc);
}

}  // namespace detail

inline BallReach ball_reach(const SpaceD& space) {
  BallReach reach;
  if (space.algebra()->central_dim() == 0) return reach;
  const h3::Form form = h3::closed_form_of(space);
  if (form.kind == h3::Form::Kind::L2) {
    // max |z| over the fiber of 0 is attained by the full circle (area of a
    // unit-circumference circle); over the whole ball by the half circle.
    reach.axis = std::fabs(form.c) / (4.0 * h3::kPi);
    reach.full = std::fabs(form.c) / (2.0 * h3::kPi);
    return reach;
  }
  if (form.kind == h3::Form::Kind::L1) {
    // fiber of 0: the unit square loop; whole ball: the half-wrapped
    // staircase (x = 1/2, z = x(1-x)/2).
    reach.axis = std::fabs(form.c) / 16.0;
    reach.full = std::fabs(form.c) / 8.0;
    return reach;
  }
  if (auto prod = detect_l1_product(space)) {
    reach.axis = std::fabs(prod->c) / 16.0;
    reach.full = std::fabs(prod->c) / 8.0;
    return reach;
  }
  const double b = detail::commutator_sup_bound(space);
  reach.axis = reach.full = 0.25 * b;
  return reach;
}

// Fact 2.4(a) projection bound and the central-growth bound.
inline double distance_lower_bound(const SpaceD& space, const ElementD& g,
                                   const BallReach& reach, std::string* method = nullptr) {
  const VecD pi = project_pi(g);
  const double b1 = space.projected_norm(pi);
  double b2 = 0.0;
  const VecD c = space.algebra()->central_part(g.coords());
  const double cn = vec::norm2(c);
  const bool central = vec::norm_inf(pi) <= 1e-12;
  const double k = central ? reach.axis : reach.full;
  if (cn > 0 && k > 0) b2 = std::sqrt(cn / k);
  if (method) *method = b2 > b1 ? "central-growth" : "projection";
  return std::max(b1, b2);
}

// Lemma 3.3 constant: sup of central differences between unit-ball points
// sharing pi-coordinates. A sampling lower estimate: inverse pairs of
// pi-closed extremal endpoints plus box loops.
struct K1Estimate {
  double value = 0.0;
  long samples = 0;
};

inline K1Estimate estimate_K1(const SpaceD& space, int extra_samples = 64,
                              std::uint64_t seed = 0x6b31, int steps = 256) {
  K1Estimate est;
  const auto& alg = *space.algebra();
  const int n = alg.dim();
  const int p = alg.horizontal_dim();
  if (alg.central_dim() == 0) return est;

  // Box loops close up in pi exactly; the pair (loop, loop^-1) realizes twice
  // the loop's central reach.
  est.value = 2.0 * detail::box_central_reach(space);

  // pi-closed extremal endpoints (soft penalty keeps the search on the
  // fiber; the pair is only valid when the endpoint really projects to 0).
  if (space.norm().kind() == NormD::Kind::L2) {
    double c = 0.0, pi_norm = 1.0;
    detail::extremal_central_reach(space, steps, 50.0, &c, &pi_norm);
    if (pi_norm <= 1e-6) est.value = std::max(est.value, 2.0 * c);
  }

  // Random extremal endpoints at times <= 1, paired when pi-coordinates agree.
  Rng rng(seed);
  std::vector<std::pair<VecD, VecD>> pts;  // (pi, central)
  for (int s = 0; s < extra_samples; ++s) {
    VecD xi0(static_cast<std::size_t>(n));
    for (auto& x : xi0) x = rng.normal();
    const double T = rng.uniform(0.25, 1.0);
    try {
      ExtremalState s0{vec::zero<double>(n), xi0, -1.0, 0.0};
      Trajectory t = integrate_extremal(alg, space.norm(), s0, T, steps);
      const VecD& x = t.points.back().x;
      VecD pi(x.begin(), x.begin() + p);
      VecD c(x.begin() + p, x.end());
      pts.emplace_back(pi, c);
      pts.emplace_back(vec::neg(pi), vec::neg(c));  // inverse, same ball
    } catch (const Error&) {
    }
  }
  est.samples = static_cast<long>(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (vec::norm_inf(vec::sub(pts[i].first, pts[j].first)) > 1e-8) continue;
      est.value = std::max(est.value, vec::norm2(vec::sub(pts[i].second, pts[j].second)));
    }
  return est;
}

// Lemma 3.6 constant: smallest K with d_inf <= K d + K and d <= K d_inf + K^2
// over a sample; needs estimates of both metrics.
inline double estimate_K2(const SpaceD& general, const SpaceD& cone, int samples,
                          std::uint64_t seed, const PathOptOptions& popts = {}) {
  Rng rng(seed);
  const auto& alg = general.algebra();
  double k2 = 1.0;
  for (int s = 0; s < samples; ++s) {
    VecD coords(static_cast<std::size_t>(alg->dim()));
    for (int i = 0; i < alg->dim(); ++i)
      coords[static_cast<std::size_t>(i)] = rng.uniform(-3.0, 3.0) * (i < alg->horizontal_dim() ? 1.0 : 2.0);
    ElementD g(alg, coords);
    auto rd = optimize_path_to(general, g, popts);
    auto rc = optimize_path_to(cone, ElementD(cone.algebra(), coords), popts);
    if (!rd.feasible || !rc.feasible) continue;
    const double d = rd.length, dinf = rc.length;
    k2 = std::max(k2, dinf / (d + 1.0));
    k2 = std::max(k2, 0.5 * (-dinf + std::sqrt(dinf * dinf + 4.0 * d)));
  }
  return k2;
}

// Lemma 3.4 constant: inf over central directions of the best commutator norm
// attainable parallel to that direction. Exact scan for a 1-dim center,
// sampled inf otherwise.
inline double estimate_L(const SpaceD& space, int dir_samples = 128) {
  const int m = space.algebra()->central_dim();
  if (m == 0) return 0.0;
  auto best_for = [&](const VecD& dir) {
    VecD X, Y;
    double v = 0.0;
    if (!pathopt_detail::best_commutator_pair(space, dir, X, Y, v)) return 0.0;
    const VecD br = space.algebra()->bracket(space.embed(X), space.embed(Y));
    const VecD brc = space.algebra()->central_part(br);
    const double bn = vec::norm2(brc);
    if (bn <= 0) return 0.0;
    // require near-parallelism to count as "in the ray of dir"
    if (vec::dot(brc, dir) < 0.999 * bn) return 0.0;
    return bn;
  };
  if (m == 1) return std::min(best_for({1.0}), best_for({-1.0}));
  double inf_val = std::numeric_limits<double>::infinity();
  for (const auto& d : detail::sphere_samples(m, dir_samples))
    inf_val = std::min(inf_val, best_for(d));
  return std::isfinite(inf_val) ? inf_val : 0.0;
}

// Full multi-method estimator with per-space cached constants.
class DistanceEstimator {
 public:
  DistanceEstimator(SpaceD space, DistanceOptions opts = {})
      : space_(std::move(space)), opts_(std::move(opts)) {
    form_ = h3::closed_form_of(space_);
    product_ = detect_l1_product(space_);
    abelian_ = space_.algebra()->central_dim() == 0;
  }

  const SpaceD& space() const { return space_; }
  const DistanceOptions& options() const { return opts_; }

  bool has_closed_form() const {
    return abelian_ || form_.kind != h3::Form::Kind::None || product_.has_value();
  }

  const BallReach& reach() const {
    if (!reach_) reach_ = ball_reach(space_);
    return *reach_;
  }

  double closed_form_distance(const VecD& coords) const {
    if (abelian_) return space_.projected_norm(space_.algebra()->project(coords));
    if (form_.kind != h3::Form::Kind::None) return h3::distance(form_, coords);
    if (product_) return l1_product_distance(*product_, coords);
    fail(ErrorCode::InvalidArgument, "no closed form available");
  }

  DistanceEstimate estimate(const ElementD& g) const {
    DistanceEstimate est;
    const VecD& coords = g.coords();
    if (vec::norm_inf(coords) == 0.0) {
      est.lower = est.upper = 0.0;
      est.lower_method = est.upper_method = "identity";
      est.witness = PathD(space_);
      est.witness_endpoint_gap = 0.0;
      return est;
    }

    if (opts_.use_closed_form && has_closed_form()) {
      const double d = closed_form_distance(coords);
      est.lower = est.upper = d;
      est.lower_method = est.upper_method = "closed-form";
      if (opts_.want_witness) attach_closed_form_witness(g, est);
      return est;
    }

    if (opts_.use_lower_bounds) {
      std::string method;
      est.lower = distance_lower_bound(space_, g, reach(), &method);
      est.lower_method = method;
    }

    if (opts_.use_shooting && space_.standard_basis()) {
      auto res = shoot(space_.algebra(), space_.norm(), coords, opts_.shoot);
      if (res.converged && res.time < est.upper) {
        est.upper = res.time;
        est.upper_method = "shooting";
        est.shooting_covector = res.xi0;
        if (opts_.want_witness) {
          auto path = shooting_witness(res, g);
          if (path) {
            est.witness = std::move(*path);
            est.witness_endpoint_gap =
                vec::norm_inf(vec::sub(coords, est.witness->endpoint().coords()));
            const double len = est.witness->length();
            if (len < est.upper) est.upper = len;
          }
        }
      }
    }

    if (opts_.use_paths) {
      auto res = optimize_path_to(space_, g, opts_.path);
      if (res.feasible && res.length < est.upper - 1e-12) {
        est.upper = res.length;
        est.upper_method = "path-optimization";
        est.witness = displacements_to_path(space_, res.displacements);
        est.witness_endpoint_gap = res.endpoint_gap;
      }
    }

    if (est.lower > est.upper) {
      est.lower = est.upper;
      est.lower_clamped = true;
    }
    return est;
  }

 private:
  void attach_closed_form_witness(const ElementD& g, DistanceEstimate& est) const {
    const VecD& coords = g.coords();
    if (abelian_) {
      PathD path(space_);
      const VecD lift = space_.lift_min_norm(space_.algebra()->project(coords));
      path.append_displacement(lift);
      est.witness = std::move(path);
      est.witness_endpoint_gap = 0.0;
      return;
    }
    if (form_.kind == h3::Form::Kind::L1) {
      est.witness = h3::l1_geodesic(space_, coords[0], coords[1], coords[2] / form_.c);
      est.witness_endpoint_gap =
          vec::norm_inf(vec::sub(coords, est.witness->endpoint().coords()));
      return;
    }
    if (form_.kind == h3::Form::Kind::L2 && std::fabs(coords[0]) < 1e-14 &&
        std::fabs(coords[1]) < 1e-14) {
      PathD arc = h3::l2_central_arc(space_, coords[2] / form_.c, 256);
      std::vector<VecD> w;
      for (const auto& seg : arc.segments()) w.push_back(vec::scale(seg.duration, seg.direction));
      if (pathopt_detail::repair(space_, w, g)) {
        est.witness = displacements_to_path(space_, w);
        est.witness_endpoint_gap =
            vec::norm_inf(vec::sub(coords, est.witness->endpoint().coords()));
      }
      return;
    }
    // General l2 targets: fall back to the path optimizer for the witness.
    auto res = optimize_path_to(space_, g, opts_.path);
    if (res.feasible) {
      est.witness = displacements_to_path(space_, res.displacements);
      est.witness_endpoint_gap = res.endpoint_gap;
    }
  }

  std::optional<PathD> shooting_witness(const ShootResult& res, const ElementD& g) const {
    try {
      ExtremalState s0{vec::zero<double>(space_.algebra()->dim()), res.xi0, -1.0, 0.0};
      Trajectory traj =
          integrate_extremal(*space_.algebra(), space_.norm(), s0, res.time, opts_.shoot.steps);
      std::vector<VecD> w;
      for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
        const double dt = traj.points[i + 1].t - traj.points[i].t;
        if (dt <= 0) continue;
        w.push_back(vec::scale(dt, traj.points[i].u));
      }
      if (!pathopt_detail::repair(space_, w, g)) return std::nullopt;
      return displacements_to_path(space_, w);
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  SpaceD space_;
  DistanceOptions opts_;
  h3::Form form_;
  std::optional<L1ProductForm> product_;
  bool abelian_ = false;
  mutable std::optional<BallReach> reach_;
};

inline DistanceEstimate estimate_distance(const SpaceD& space, const ElementD& g,
                                          const DistanceOptions& opts = {}) {
  return DistanceEstimator(space, opts).estimate(g);
}

}  // namespace carnot
