#include "carnot/convergence.hpp"

#include <gtest/gtest.h>

#include "carnot/heisenberg.hpp"

using namespace carnot;

namespace {

TEST(FitExponent, RecoversKnownDecays) {
  std::vector<std::pair<double, double>> inv, half, flat;
  for (int n : {4, 8, 16, 32, 64}) {
    inv.emplace_back(n, 3.0 / n);
    half.emplace_back(n, 2.0 / std::sqrt(static_cast<double>(n)));
    flat.emplace_back(n, 0.7);
  }
  auto f1 = fit_exponent(inv);
  EXPECT_NEAR(f1.alpha, 1.0, 1e-12);
  EXPECT_NEAR(f1.stderr_alpha, 0.0, 1e-12);
  EXPECT_NEAR(fit_exponent(half).alpha, 0.5, 1e-12);
  EXPECT_NEAR(fit_exponent(flat).alpha, 0.0, 1e-12);
}

TEST(FitExponent, RequiresThreeUsableRows) {
  std::vector<std::pair<double, double>> rows = {{4, 0.0}, {8, 0.0}, {16, 1.0}, {32, 0.5}};
  try {
    fit_exponent(rows);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

TEST(Hausdorff, IdenticalCloudsAreAtZero) {
  std::vector<VecD> cloud = {{0, 0}, {1, 0}, {0, 1}};
  auto dist = [](const VecD& a, const VecD& b) {
    return std::fabs(a[0] - b[0]) + std::fabs(a[1] - b[1]);
  };
  EXPECT_DOUBLE_EQ(hausdorff_discrepancy(cloud, cloud, dist), 0.0);
}

TEST(Hausdorff, OneExtraPointSetsTheDistance) {
  std::vector<VecD> a = {{0, 0}, {1, 0}};
  std::vector<VecD> b = a;
  b.push_back({1.0, 0.3});
  auto dist = [](const VecD& x, const VecD& y) {
    return std::fabs(x[0] - y[0]) + std::fabs(x[1] - y[1]);
  };
  EXPECT_NEAR(hausdorff_discrepancy(a, b, dist), 0.3, 1e-12);
}

TEST(Hausdorff, EmptyCloudRejected) {
  std::vector<VecD> a = {{0, 0}};
  std::vector<VecD> b;
  auto dist = [](const VecD&, const VecD&) { return 0.0; };
  EXPECT_THROW(hausdorff_discrepancy(a, b, dist), Error);
}

TEST(Hausdorff, ScaledTaxicabBallAgainstUnitBall) {
  // scaled Z^2 ball of radius n against an L1 unit-ball grid: within the
  // lattice spacing 2/n.
  const int n = 10;
  ZdLattice lat(2);
  auto sym = symmetrize_generators<ZdLattice, LatticeElementHash>(lat, lat.standard_generators());
  auto table = bfs_ball(lat, sym, n);
  std::vector<VecD> scaled;
  for (const auto& [g, d] : table.dist)
    scaled.push_back({static_cast<double>(g[0]) / n, static_cast<double>(g[1]) / n});
  std::vector<VecD> ball;
  const int m = 20;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j) {
      const double x = static_cast<double>(i) / m, y = static_cast<double>(j) / m;
      if (std::fabs(x) + std::fabs(y) <= 1.0) ball.push_back({x, y});
    }
  auto dist = [](const VecD& a, const VecD& b) {
    return std::fabs(a[0] - b[0]) + std::fabs(a[1] - b[1]);
  };
  EXPECT_LE(hausdorff_discrepancy(scaled, ball, dist), 2.0 / n);
}

TEST(ConeNorm, StandardHeisenbergGeneratorsGiveL1) {
  H3ZLattice lat;
  auto sym = symmetrize_generators<H3ZLattice, LatticeElementHash>(lat, lat.standard_generators());
  NormD cone = cone_norm_from_generators(lat, sym);
  EXPECT_TRUE(h3::norm_is_l1_like(cone));
}

TEST(Pointwise, TaxicabAgreesExactly) {
  ZdLattice lat(2);
  auto sym = symmetrize_generators<ZdLattice, LatticeElementHash>(lat, lat.standard_generators());
  auto table = bfs_ball(lat, sym, 12);
  SpaceD cone = SpaceD::standard(lat.algebra_d(), cone_norm_from_generators(lat, sym));
  DistanceOptions dopts;
  dopts.use_closed_form = true;
  dopts.want_witness = false;
  DistanceEstimator est(cone, dopts);
  auto eval = [&](const VecD& coords) { return est.estimate(ElementD(cone.algebra(), coords)); };
  for (int n : {0, 4, 8, 12}) {
    auto row = pointwise_discrepancy(lat, table, n, eval);
    EXPECT_DOUBLE_EQ(row.discrepancy, 0.0);
    EXPECT_EQ(row.skipped, 0);
  }
}

TEST(Pointwise, CentralDirectionMatchesBfsAgainstClosedForm) {
  // |rho(0,0,m) - d1(embed)| compared directly on central elements.
  H3ZLattice lat;
  auto sym = symmetrize_generators<H3ZLattice, LatticeElementHash>(lat, lat.standard_generators());
  auto table = bfs_ball(lat, sym, 12);
  for (int m : {1, 2, 4, 9}) {
    const int rho = word_length(lat, sym, {0, 0, m}, &table);
    const double dinf = h3::l1_distance(0, 0, m);
    EXPECT_NEAR(dinf, 4.0 * std::sqrt(m), 1e-12);
    EXPECT_LE(std::fabs(rho - dinf), 2.0);
  }
}

TEST(Pointwise, HeisenbergProfileBoundedAndShrinkingWhenScaled) {
  H3ZLattice lat;
  auto sym = symmetrize_generators<H3ZLattice, LatticeElementHash>(lat, lat.standard_generators());
  auto table = bfs_ball(lat, sym, 24);
  SpaceD cone = SpaceD::standard(lat.algebra_d(), cone_norm_from_generators(lat, sym));
  DistanceOptions dopts;
  dopts.use_closed_form = true;
  dopts.want_witness = false;
  DistanceEstimator est(cone, dopts);
  auto eval = [&](const VecD& coords) { return est.estimate(ElementD(cone.algebra(), coords)); };
  PointwiseOptions popts;
  popts.sample_cap = 4000;
  auto profile = discrepancy_profile(lat, table, {8, 16, 24}, eval, popts);
  ASSERT_EQ(profile.rows.size(), 3u);
  EXPECT_TRUE(profile.reliable);
  // bounded discrepancy (the headline dichotomy at desk scale)
  for (const auto& r : profile.rows) EXPECT_LE(r.discrepancy, 3.0);
  // scaled (Theorem-2.3-style) convergence: sup|rho/n - d/n| strictly smaller
  // at n=24 than at n=8
  const double early = profile.rows.front().discrepancy / 8.0;
  const double late = profile.rows.back().discrepancy / 24.0;
  EXPECT_LT(late, early);
}

TEST(Pointwise, SkipPolicyCountsWideGaps) {
  H3ZLattice lat;
  auto sym = symmetrize_generators<H3ZLattice, LatticeElementHash>(lat, lat.standard_generators());
  auto table = bfs_ball(lat, sym, 4);
  auto eval = [&](const VecD&) {
    DistanceEstimate e;
    e.lower = 0.0;
    e.upper = 10.0;  // gap 10 > threshold
    return e;
  };
  auto row = pointwise_discrepancy(lat, table, 4, eval);
  EXPECT_EQ(row.skipped, row.samples);
  EXPECT_DOUBLE_EQ(row.discrepancy, 0.0);
}

TEST(Pointwise, DiscrepancyMonotoneInSampleBudget) {
  H3ZLattice lat;
  auto sym = symmetrize_generators<H3ZLattice, LatticeElementHash>(lat, lat.standard_generators());
  auto table = bfs_ball(lat, sym, 16);
  SpaceD cone = SpaceD::standard(lat.algebra_d(), cone_norm_from_generators(lat, sym));
  DistanceOptions dopts;
  dopts.use_closed_form = true;
  dopts.want_witness = false;
  DistanceEstimator est(cone, dopts);
  auto eval = [&](const VecD& coords) { return est.estimate(ElementD(cone.algebra(), coords)); };
  PointwiseOptions a, b;
  a.sample_cap = 200;
  b.sample_cap = 2000;
  a.seed = b.seed = 99;
  const double da = pointwise_discrepancy(lat, table, 16, eval, a).discrepancy;
  const double db = pointwise_discrepancy(lat, table, 16, eval, b).discrepancy;
  EXPECT_GE(db, da - 1e-12);
}

}  // namespace
