#pragma once

#include <functional>
#include <optional>

#include "carnot/distance.hpp"
#include "carnot/wordmetric.hpp"

namespace carnot {

// Discrepancy between the word metric and the asymptotic-cone metric,
// measured on spheres: D(n) = sup |rho_S(g) - d_inf(embed g)|. Bounded D is
// the (1,C)-quasi-isometry; the fitted decay of D(n)/n tracks the
// Gromov-Hausdorff convergence speed of the scaled balls.
struct DiscrepancyRow {
  int n = 0;
  double discrepancy = 0.0;
  long samples = 0;
  long skipped = 0;  // estimator gap too wide
  std::string method = "pointwise";
};

struct ExponentFit {
  double alpha = 0.0;
  double stderr_alpha = 0.0;
  long used_rows = 0;
  long zero_rows = 0;
};

struct DiscrepancyProfile {
  std::vector<DiscrepancyRow> rows;
  std::optional<ExponentFit> fit;        // of D(n) itself
  std::optional<ExponentFit> scaled_fit; // of D(n)/n, the ball-discrepancy proxy
  double exclusion_rate = 0.0;
  bool reliable = true;  // false when more than 10% of points were skipped
  std::string note;
};

// Least-squares slope of log D against log n, negated. Zero rows are
// excluded and reported.
inline ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& n_vs_d) {
  ExponentFit fit;
  std::vector<double> xs, ys;
  for (const auto& [n, d] : n_vs_d) {
    if (d <= 1e-9) {  // exact agreement up to solver noise
      ++fit.zero_rows;
      continue;
    }
    xs.push_back(std::log(n));
    ys.push_back(std::log(d));
  }
  fit.used_rows = static_cast<long>(xs.size());
  require(fit.used_rows >= 3, ErrorCode::InvalidArgument,
          "exponent fit needs at least 3 usable rows");
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  require(denom > 1e-12, ErrorCode::InvalidArgument, "degenerate abscissa in exponent fit");
  const double slope = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / m;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss += r * r;
  }
  fit.alpha = -slope;
  if (xs.size() > 2) fit.stderr_alpha = std::sqrt(ss / (m - 2.0) / (sxx - sx * sx / m));
  return fit;
}

inline ExponentFit fit_exponent(const std::vector<DiscrepancyRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) pts.emplace_back(static_cast<double>(r.n), r.discrepancy);
  return fit_exponent(pts);
}

// Symmetric Hausdorff distance between two point clouds under a caller
// supplied metric evaluator.
inline double hausdorff_discrepancy(const std::vector<VecD>& cloud_a, const std::vector<VecD>& cloud_b,
                                    const std::function<double(const VecD&, const VecD&)>& dist) {
  require(!cloud_a.empty() && !cloud_b.empty(), ErrorCode::InvalidArgument, "empty cloud");
  auto one_sided = [&](const std::vector<VecD>& from, const std::vector<VecD>& to) {
    double sup = 0.0;
    for (const auto& a : from) {
      double inf_d = std::numeric_limits<double>::infinity();
      for (const auto& b : to) inf_d = std::min(inf_d, dist(a, b));
      sup = std::max(sup, inf_d);
    }
    return sup;
  };
  return std::max(one_sided(cloud_a, cloud_b), one_sided(cloud_b, cloud_a));
}

struct PointwiseOptions {
  long full_sphere_cap = 100000;
  long sample_cap = 10000;
  double gap_threshold = 0.5;
  std::uint64_t seed = 0xd15c;
  unsigned threads = 1;
};

// Max over a (sampled) sphere of |rho - d_inf| with the skip policy: points
// whose estimator gap exceeds the threshold are excluded and counted.
template <class L, class Hash = LatticeElementHash>
DiscrepancyRow pointwise_discrepancy(const L& lattice,
                                     const BallTable<std::decay_t<decltype(std::declval<L>().identity())>, Hash>& ball,
                                     int n,
                                     const std::function<DistanceEstimate(const VecD&)>& estimator,
                                     const PointwiseOptions& opts = {}) {
  DiscrepancyRow row;
  row.n = n;
  if (n == 0) {
    row.samples = 1;
    return row;
  }
  require(ball.completed_radius >= n, ErrorCode::BudgetExceeded,
          "ball table does not cover radius " + std::to_string(n));
  auto sphere = ball.sphere(n);
  std::vector<std::size_t> chosen(sphere.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i] = i;
  if (static_cast<long>(sphere.size()) > opts.full_sphere_cap ||
      static_cast<long>(sphere.size()) > opts.sample_cap) {
    Rng rng(opts.seed + static_cast<std::uint64_t>(n));
    const std::size_t want = static_cast<std::size_t>(std::min<long>(opts.sample_cap, static_cast<long>(sphere.size())));
    for (std::size_t i = 0; i < want; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(chosen.size() - i - 1)));
      std::swap(chosen[i], chosen[j]);
    }
    chosen.resize(want);
  }
  row.samples = static_cast<long>(chosen.size());
  std::vector<double> diffs(chosen.size(), -1.0);  // negative: skipped
  parallel_for(chosen.size(), opts.threads, [&](std::size_t i) {
    const auto& g = sphere[chosen[i]];
    const VecD coords = vec::to_dbl(lattice.embed(g));
    const DistanceEstimate est = estimator(coords);
    if (est.gap() > opts.gap_threshold) return;
    diffs[i] = std::fabs(static_cast<double>(n) - est.mid());
  });
  for (double d : diffs) {
    if (d < 0)
      ++row.skipped;
    else
      row.discrepancy = std::max(row.discrepancy, d);
  }
  return row;
}

// Full profile over a schedule of radii with fits and the skip accounting.
template <class L, class Hash = LatticeElementHash>
DiscrepancyProfile discrepancy_profile(const L& lattice,
                                       const BallTable<std::decay_t<decltype(std::declval<L>().identity())>, Hash>& ball,
                                       const std::vector<int>& schedule,
                                       const std::function<DistanceEstimate(const VecD&)>& estimator,
                                       const PointwiseOptions& opts = {}) {
  DiscrepancyProfile profile;
  long total = 0, skipped = 0;
  for (int n : schedule) {
    auto row = pointwise_discrepancy<L, Hash>(lattice, ball, n, estimator, opts);
    total += row.samples;
    skipped += row.skipped;
    profile.rows.push_back(std::move(row));
  }
  profile.exclusion_rate = total > 0 ? static_cast<double>(skipped) / static_cast<double>(total) : 0.0;
  profile.reliable = profile.exclusion_rate <= 0.10;
  try {
    profile.fit = fit_exponent(profile.rows);
  } catch (const Error&) {
    profile.note = "exponent fit unavailable (too few nonzero rows)";
  }
  try {
    std::vector<std::pair<double, double>> scaled;
    for (const auto& r : profile.rows)
      scaled.emplace_back(static_cast<double>(r.n), r.discrepancy / std::max(1, r.n));
    profile.scaled_fit = fit_exponent(scaled);
  } catch (const Error&) {
  }
  return profile;
}

// Cone norm of a word metric: the polytope hull of the projected generators.
template <class L>
NormD cone_norm_from_generators(const L& lattice,
                                const std::vector<std::decay_t<decltype(std::declval<L>().identity())>>& symmetric_gens) {
  const auto& alg = lattice.algebra_d();
  std::vector<VecD> verts;
  for (const auto& g : symmetric_gens) {
    VecD e = vec::to_dbl(lattice.embed(g));
    VecD pi(e.begin(), e.begin() + alg->horizontal_dim());
    bool dup = false;
    for (const auto& v : verts)
      if (vec::norm_inf(vec::sub(v, pi)) < 1e-12) {
        dup = true;
        break;
      }
    if (!dup && vec::norm_inf(pi) > 1e-14) verts.push_back(std::move(pi));
  }
  return NormD::polytope(std::move(verts));
}

}  // namespace carnot
