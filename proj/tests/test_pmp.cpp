#include "carnot/pmp.hpp"

#include <gtest/gtest.h>

#include "carnot/nonsingular.hpp"
#include "carnot/rng.hpp"

using namespace carnot;

namespace {

constexpr double kPi = 3.141592653589793238462643383;

TEST(Momenta, ZeroBasePointReadsCovector) {
  auto alg = heisenberg_algebra();
  EXPECT_EQ(horizontal_momenta(*alg, {0, 0, 0}, {2.5, -1.5, 9.0}), (VecD{2.5, -1.5}));
}

TEST(Momenta, CentralCovectorCorrection) {
  auto alg = heisenberg_algebra();
  // h2 = xi2 + x1 xi3 c_{12}/2 = 1/2
  EXPECT_EQ(horizontal_momenta(*alg, {1, 0, 0}, {0, 0, 1}), (VecD{0, 0.5}));
}

TEST(Momenta, AbnormalWitnessStateVanishes) {
  auto alg = r_times_heisenberg_algebra();
  SpaceD space = SpaceD::standard(alg, NormD::l2(3));
  auto ab = abnormal_from_witness(space, {0, 0, 1}, {1}, 20);
  for (const auto& pt : ab.trajectory.points)
    EXPECT_LE(vec::norm_inf(horizontal_momenta(*alg, pt.x, pt.xi)), 1e-14);
}

TEST(IntegrateSmooth, StraightLineWhenCentralMomentumVanishes) {
  auto alg = heisenberg_algebra();
  ExtremalState s0{{0, 0, 0}, {1, 0, 0}, -1.0, 0.0};
  auto traj = integrate_extremal(*alg, NormD::l2(2), s0, 1.0, 256);
  const VecD& x = traj.points.back().x;
  EXPECT_NEAR(x[0], 1.0, 1e-12);
  EXPECT_NEAR(x[1], 0.0, 1e-12);
  EXPECT_NEAR(x[2], 0.0, 1e-12);
}

TEST(IntegrateSmooth, FullCircleReachesTheCenter) {
  auto alg = heisenberg_algebra();
  ExtremalState s0{{0, 0, 0}, {1, 0, 2.0 * kPi}, -1.0, 0.0};
  auto traj = integrate_extremal(*alg, NormD::l2(2), s0, 1.0, 2048);
  const VecD& x = traj.points.back().x;
  EXPECT_NEAR(x[0], 0.0, 1e-6);
  EXPECT_NEAR(x[1], 0.0, 1e-6);
  EXPECT_NEAR(x[2], 1.0 / (4.0 * kPi), 1e-9);
}

TEST(IntegrateSmooth, ConstantControlForAnyHorizontalCovector) {
  auto alg = heisenberg_squared_algebra();
  Rng rng(71);
  for (int rep = 0; rep < 20; ++rep) {
    VecD xi0(6, 0.0);
    for (int i = 0; i < 4; ++i) xi0[i] = rng.normal();
    const double T = rng.uniform(0.3, 2.0);
    ExtremalState s0{vec::zero<double>(6), xi0, -1.0, 0.0};
    auto traj = integrate_extremal(*alg, NormD::l2(4), s0, T, 512);
    // no central momentum: straight line with endpoint T * u
    VecD h0(xi0.begin(), xi0.begin() + 4);
    const double n0 = vec::norm2(h0);
    const VecD& x = traj.points.back().x;
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(x[i], T * h0[i] / n0, 1e-10);
  }
}

TEST(IntegrateSmooth, HamiltonianConservedAtTightTolerance) {
  auto alg = heisenberg_algebra();
  Rng rng(73);
  for (int rep = 0; rep < 25; ++rep) {
    VecD xi0{rng.normal(), rng.normal(), rng.uniform(-8, 8)};
    if (vec::norm2({xi0[0], xi0[1]}) < 0.2) continue;
    const double T = rng.uniform(0.5, 3.0);
    ExtremalState s0{{0, 0, 0}, xi0, -1.0, 0.0};
    auto traj = integrate_extremal(*alg, NormD::l2(2), s0, T, 2048);
    EXPECT_LE(hamiltonian_drift(*alg, NormD::l2(2), traj), 1e-8);
  }
}

TEST(IntegrateSmooth, MomentaVanishedIsReported) {
  auto alg = heisenberg_algebra();
  ExtremalState s0{{0, 0, 0}, {0, 0, 1}, -1.0, 0.0};  // h(0) = 0
  try {
    integrate_extremal(*alg, NormD::l2(2), s0, 1.0, 64);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MomentaVanished);
  }
}

TEST(IntegrateBangBang, StraightWhenMomentaConstant) {
  auto alg = heisenberg_algebra();
  ExtremalState s0{{0, 0, 0}, {2, 1, 0}, -1.0, 0.0};
  auto traj = integrate_extremal(*alg, NormD::l1(2), s0, 3.0, 64);
  const VecD& x = traj.points.back().x;
  // the l1 support at (2,1) is the vertex e1
  EXPECT_NEAR(x[0], 3.0, 1e-12);
  EXPECT_NEAR(x[1], 0.0, 1e-12);
  EXPECT_EQ(traj.switch_count, 0);
}

TEST(IntegrateBangBang, SpiralsSwitchAndConserveHamiltonian) {
  auto alg = heisenberg_algebra();
  Rng rng(79);
  for (int rep = 0; rep < 20; ++rep) {
    VecD xi0{rng.normal(), rng.normal(), rng.uniform(1.0, 6.0)};
    if (std::fabs(xi0[0]) + std::fabs(xi0[1]) < 0.3) continue;
    ExtremalState s0{{0, 0, 0}, xi0, -1.0, 0.0};
    auto traj = integrate_extremal(*alg, NormD::l1(2), s0, 4.0, 128);
    EXPECT_GE(traj.switch_count, 1);
    EXPECT_LE(hamiltonian_drift(*alg, NormD::l1(2), traj), 1e-10);
  }
}

TEST(IntegrateBangBang, SwitchStructureSurvivesCornerTies) {
  // At corners the momenta tie; the slope rule must rotate the control
  // instead of stalling.
  auto alg = heisenberg_algebra();
  ExtremalState s0{{0, 0, 0}, {0.5, 0.0, 1.0}, -1.0, 0.0};
  auto traj = integrate_extremal(*alg, NormD::l1(2), s0, 4.0, 256);
  EXPECT_GE(traj.switch_count, 3);
  EXPECT_LE(hamiltonian_drift(*alg, NormD::l1(2), traj), 1e-10);
}

TEST(IsAbnormal, NormalCircleIsNot) {
  auto alg = heisenberg_algebra();
  ExtremalState s0{{0, 0, 0}, {1, 0, 2.0 * kPi}, -1.0, 0.0};
  auto traj = integrate_extremal(*alg, NormD::l2(2), s0, 1.0, 256);
  const auto chk = is_abnormal(*alg, traj);
  EXPECT_FALSE(chk.abnormal);
  EXPECT_NEAR(chk.residual, 1.0, 1e-9);  // unit-speed momenta
}

TEST(IsAbnormal, ZeroLengthIsDegenerate) {
  Trajectory traj;
  traj.duration = 0.0;
  traj.points.push_back({0.0, {0, 0, 0}, {0, 0, 1}, {1, 0}});
  const auto chk = is_abnormal(*heisenberg_algebra(), traj);
  EXPECT_TRUE(chk.abnormal);
  EXPECT_TRUE(chk.degenerate);
}

// Non-singular groups admit no nontrivial abnormal extremals: none of 1000
// random normal integrations on h3 tests abnormal.
TEST(IsAbnormal, NoFalsePositivesOnHeisenberg) {
  auto alg = heisenberg_algebra();
  Rng rng(83);
  int checked = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    VecD xi0{rng.normal(), rng.normal(), rng.uniform(-10, 10)};
    if (vec::norm2({xi0[0], xi0[1]}) < 1e-3) continue;
    ExtremalState s0{{0, 0, 0}, xi0, -1.0, 0.0};
    try {
      auto traj = integrate_extremal(*alg, NormD::l2(2), s0, rng.uniform(0.2, 2.0), 64);
      EXPECT_FALSE(is_abnormal(*alg, traj).abnormal);
      ++checked;
    } catch (const Error&) {
    }
  }
  EXPECT_GE(checked, 990);
}

TEST(IntegrateBangBang, EndpointIndependentOfSamplingDensity) {
  // Switch times are exact roots and legs advance in closed form, so the
  // endpoint must not depend on how densely the trajectory is sampled.
  auto alg = heisenberg_algebra();
  ExtremalState s0{{0, 0, 0}, {1.0, 0.3, 2.0}, -1.0, 0.0};
  auto coarse = integrate_extremal(*alg, NormD::l1(2), s0, 2.0, 16);
  auto fine = integrate_extremal(*alg, NormD::l1(2), s0, 2.0, 4096);
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(coarse.points.back().x[i], fine.points.back().x[i], 1e-12);
}

}  // namespace
