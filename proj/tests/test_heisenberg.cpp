#include "carnot/heisenberg.hpp"

#include <gtest/gtest.h>

#include "carnot/distance.hpp"
#include "carnot/rng.hpp"

using namespace carnot;

namespace {

constexpr double kPi = 3.141592653589793238462643383;

TEST(L1ClosedForm, KnownValues) {
  EXPECT_DOUBLE_EQ(h3::l1_distance(1, 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(h3::l1_distance(3, -4, 0), 7.0);
  EXPECT_DOUBLE_EQ(h3::l1_distance(0, 0, 1), 4.0);   // unit square loop
  EXPECT_DOUBLE_EQ(h3::l1_distance(0, 0, 4), 8.0);   // t^2/16 scaling
  EXPECT_DOUBLE_EQ(h3::l1_distance(2, 1, 1), 3.0);   // |z| <= xy/2: staircase
  EXPECT_DOUBLE_EQ(h3::l1_distance(2, 0, 2), 4.0);   // one-sided bulge: x + 2z/x
}

TEST(L1ClosedForm, SymmetryOrbit) {
  Rng rng(41);
  for (int rep = 0; rep < 200; ++rep) {
    const double x = rng.uniform(-3, 3), y = rng.uniform(-3, 3), z = rng.uniform(-5, 5);
    const double d = h3::l1_distance(x, y, z);
    EXPECT_DOUBLE_EQ(h3::l1_distance(-x, y, -z), d);
    EXPECT_DOUBLE_EQ(h3::l1_distance(x, -y, -z), d);
    EXPECT_DOUBLE_EQ(h3::l1_distance(y, x, -z), d);
    EXPECT_DOUBLE_EQ(h3::l1_distance(-x, -y, z), d);
  }
}

TEST(L1ClosedForm, DilationHomogeneity) {
  Rng rng(43);
  for (int rep = 0; rep < 200; ++rep) {
    const double x = rng.uniform(-2, 2), y = rng.uniform(-2, 2), z = rng.uniform(-3, 3);
    const double t = rng.uniform(0.1, 4.0);
    EXPECT_NEAR(h3::l1_distance(t * x, t * y, t * t * z), t * h3::l1_distance(x, y, z),
                1e-10 * (1 + t));
  }
}

TEST(L1Synthesis, RealizesTheClosedForm) {
  auto space = SpaceD::standard(heisenberg_algebra(), NormD::l1(2));
  Rng rng(47);
  for (int rep = 0; rep < 300; ++rep) {
    const double x = rng.uniform(-3, 3), y = rng.uniform(-3, 3), z = rng.uniform(-6, 6);
    PathD p = h3::l1_geodesic(space, x, y, z);
    const VecD end = p.endpoint().coords();
    EXPECT_NEAR(end[0], x, 1e-10);
    EXPECT_NEAR(end[1], y, 1e-10);
    EXPECT_NEAR(end[2], z, 1e-10);
    EXPECT_NEAR(p.length(), h3::l1_distance(x, y, z), 1e-10);
    EXPECT_LE(p.size(), 4u);
  }
}

// Independent route: the nonlinear path optimizer never beats the closed
// form and matches it closely from its own seeds.
TEST(L1ClosedForm, AgreesWithPathOptimizer) {
  auto alg = heisenberg_algebra();
  SpaceD space = SpaceD::standard(alg, NormD::l1(2));
  Rng rng(99);
  PathOptOptions popts;
  popts.segments = 12;
  popts.restarts = 3;
  popts.sweeps = 60;
  for (int rep = 0; rep < 25; ++rep) {
    const double x = rng.uniform(-3, 3), y = rng.uniform(-3, 3), z = rng.uniform(-6, 6);
    const double cf = h3::l1_distance(x, y, z);
    auto res = optimize_path_to(space, ElementD(alg, {x, y, z}), popts);
    ASSERT_TRUE(res.feasible);
    EXPECT_GE(res.length, cf - 1e-7);
    EXPECT_LE(res.length, cf * (1.0 + 2e-3));
  }
}

TEST(L2ClosedForm, CentralValues) {
  EXPECT_NEAR(h3::l2_distance(0, 0, 1), 2.0 * std::sqrt(kPi), 1e-12);
  EXPECT_NEAR(h3::l2_distance(0, 0, 0.25), std::sqrt(kPi), 1e-12);
  EXPECT_DOUBLE_EQ(h3::l2_distance(3, 4, 0), 5.0);
}

TEST(L2ClosedForm, DilationHomogeneity) {
  Rng rng(53);
  for (int rep = 0; rep < 200; ++rep) {
    const double x = rng.uniform(-2, 2), y = rng.uniform(-2, 2), z = rng.uniform(-3, 3);
    const double t = rng.uniform(0.1, 4.0);
    EXPECT_NEAR(h3::l2_distance(t * x, t * y, t * t * z), t * h3::l2_distance(x, y, z),
                1e-8 * (1 + t));
  }
}

TEST(L2ClosedForm, MatchesExtremalIntegration) {
  // Integrate unit-speed normal extremals for time T; the endpoint must be
  // at distance exactly T.
  auto alg = heisenberg_algebra();
  NormD norm = NormD::l2(2);
  Rng rng(59);
  for (int rep = 0; rep < 40; ++rep) {
    const double phi = rng.uniform(0, 6.28);
    VecD xi0{std::cos(phi), std::sin(phi), rng.uniform(-6, 6)};
    const double T = rng.uniform(0.2, 2.5);
    ExtremalState s0{{0, 0, 0}, xi0, -1.0, 0.0};
    // skip extremals that revisit the identity fiber (past the cut time the
    // endpoint distance is smaller than T)
    if (std::fabs(xi0[2]) * T > 1.9 * kPi) continue;
    Trajectory traj = integrate_extremal(*alg, norm, s0, T, 4096);
    const VecD& x = traj.points.back().x;
    EXPECT_NEAR(h3::l2_distance(x[0], x[1], x[2]), T, 2e-6);
  }
}

TEST(L2ClosedForm, AgreesWithPathOptimizer) {
  auto alg = heisenberg_algebra();
  SpaceD space = SpaceD::standard(alg, NormD::l2(2));
  Rng rng(61);
  PathOptOptions popts;
  popts.segments = 64;
  popts.restarts = 2;
  popts.hops = 1;
  for (int rep = 0; rep < 10; ++rep) {
    const double x = rng.uniform(-3, 3), y = rng.uniform(-3, 3), z = rng.uniform(-6, 6);
    const double cf = h3::l2_distance(x, y, z);
    auto res = optimize_path_to(space, ElementD(alg, {x, y, z}), popts);
    ASSERT_TRUE(res.feasible);
    // polygonal upper bound: above cf up to discretization, never far
    EXPECT_GE(res.length, cf - 1e-7);
    EXPECT_LE(res.length, cf * 1.005);
  }
}

TEST(ClosedFormDetection, RecognizesTheStandardSpaces) {
  auto alg = heisenberg_algebra();
  EXPECT_EQ(h3::closed_form_of(SpaceD::standard(alg, NormD::l2(2))).kind, h3::Form::Kind::L2);
  EXPECT_EQ(h3::closed_form_of(SpaceD::standard(alg, NormD::l1(2))).kind, h3::Form::Kind::L1);
  auto diamond = NormD::polytope({{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
  EXPECT_EQ(h3::closed_form_of(SpaceD::standard(alg, diamond)).kind, h3::Form::Kind::L1);
  EXPECT_EQ(h3::closed_form_of(SpaceD::standard(alg, NormD::linf(2))).kind,
            h3::Form::Kind::None);
  auto r4 = r_times_heisenberg_algebra();
  EXPECT_EQ(h3::closed_form_of(SpaceD::standard(r4, NormD::l2(3))).kind, h3::Form::Kind::None);
}

TEST(ClosedFormDetection, ScaledBracketRescalesCenter) {
  auto alg = AlgebraD::validate(3, 2, {{1, 2, 3, 2.0}});
  auto form = h3::closed_form_of(SpaceD::standard(alg, NormD::l2(2)));
  ASSERT_EQ(form.kind, h3::Form::Kind::L2);
  // [X,Y] = 2Z: the element (0,0,1) here is (0,0,1/2) in the standard model.
  EXPECT_NEAR(h3::distance(form, {0, 0, 1}), 2.0 * std::sqrt(kPi * 0.5), 1e-12);
}

TEST(L1Product, SplitsAcrossTheFreeFactor) {
  auto alg = AlgebraD::validate(4, 3, {{1, 2, 4, 1.0}});
  SpaceD space = SpaceD::standard(alg, NormD::l1(3));
  auto form = detect_l1_product(space);
  ASSERT_TRUE(form.has_value());
  // coordinates (x, y, w, z): distance = |w| + d1(x,y,z)
  EXPECT_NEAR(l1_product_distance(*form, {0, 0, 2.5, 0}), 2.5, 1e-12);
  EXPECT_NEAR(l1_product_distance(*form, {1, 1, 2.5, 0.5}), 4.5, 1e-12);
  EXPECT_NEAR(l1_product_distance(*form, {0, 0, 1, 1}), 5.0, 1e-12);
}

}  // namespace
