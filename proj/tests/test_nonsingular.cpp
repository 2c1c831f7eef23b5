#include "carnot/nonsingular.hpp"

#include <gtest/gtest.h>

#include "carnot/rng.hpp"

using namespace carnot;

namespace {

TEST(SingularityMatrix, HeisenbergRotation) {
  auto alg = heisenberg_algebra();
  auto m = singularity_matrix(*alg, {0.3, 0.7});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_DOUBLE_EQ(m[0][0], -0.7);
  EXPECT_DOUBLE_EQ(m[0][1], 0.3);
}

TEST(SingularityMatrix, FreeDirectionGivesZeroMatrix) {
  auto alg = r_times_heisenberg_algebra();
  auto m = singularity_matrix(*alg, {0, 0, 1});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0], (VecD{0, 0, 0}));
}

TEST(SingularityMatrix, ProductOfHeisenbergsRankDrop) {
  auto alg = heisenberg_squared_algebra();
  auto m = singularity_matrix(*alg, {1, 0, 0, 0});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], (VecD{0, 1, 0, 0}));
  EXPECT_EQ(m[1], (VecD{0, 0, 0, 0}));
}

TEST(SingularityMatrix, LinearInU) {
  auto alg = heisenberg_squared_algebra();
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    VecD u(4), v(4);
    for (int i = 0; i < 4; ++i) {
      u[i] = rng.uniform(-2, 2);
      v[i] = rng.uniform(-2, 2);
    }
    auto mu = singularity_matrix(*alg, u);
    auto mv = singularity_matrix(*alg, v);
    auto msum = singularity_matrix(*alg, vec::add(u, v));
    for (std::size_t r = 0; r < mu.size(); ++r)
      for (std::size_t c = 0; c < mu[r].size(); ++c)
        EXPECT_DOUBLE_EQ(msum[r][c], mu[r][c] + mv[r][c]);
  }
}

TEST(Classify, HeisenbergIsNonSingularWithEpsilonOne) {
  ClassifyOptions opts;
  opts.samples = 20000;
  auto rep = classify(heisenberg_algebra(), opts);
  EXPECT_TRUE(rep.nonsingular());
  EXPECT_TRUE(rep.exact);
  EXPECT_NEAR(rep.epsilon, 1.0, 1e-9);
}

TEST(Classify, RTimesHeisenbergIsSingularWithFreeWitness) {
  ClassifyOptions opts;
  opts.samples = 20000;
  auto rep = classify(r_times_heisenberg_algebra(), opts);
  ASSERT_TRUE(rep.singular());
  EXPECT_TRUE(rep.exact);
  EXPECT_LE(rep.witness_residual, 1e-12);
  ASSERT_EQ(rep.witness.size(), 3u);
  EXPECT_NEAR(rep.witness[0], 0.0, 1e-12);
  EXPECT_NEAR(rep.witness[1], 0.0, 1e-12);
  EXPECT_NEAR(rep.witness[2], 1.0, 1e-12);
  EXPECT_NEAR(rep.covector[0], 1.0, 1e-12);
}

TEST(Classify, ProductOfHeisenbergsIsSingular) {
  ClassifyOptions opts;
  opts.samples = 20000;
  auto rep = classify(heisenberg_squared_algebra(), opts);
  ASSERT_TRUE(rep.singular());
  EXPECT_LE(rep.witness_residual, 1e-12);
  // the spec's example pair is certified singular as well
  const VecD u{1, 0, 0, 0};
  const VecD xi{0, 1};
  EXPECT_LE(detail::pair_residual(*heisenberg_squared_algebra(), u, xi), 1e-15);
}

TEST(Classify, PLessThanCenterIsImmediatelySingular) {
  // p = 1 < n - p = 1 is impossible; use p=2, center dim 3 via two commuting
  // brackets plus an extra central direction that nothing reaches.
  auto alg = AlgebraD::validate(5, 2, {{1, 2, 3, 1.0}, {1, 2, 4, 0.5}});
  auto rep = classify(alg);
  ASSERT_TRUE(rep.singular());
  EXPECT_LE(rep.witness_residual, 1e-10);
  EXPECT_TRUE(rep.exact);
}

TEST(Classify, AbelianIsVacuouslyNonSingular) {
  auto alg = AlgebraD::validate(3, 3, {});
  auto rep = classify(alg);
  EXPECT_TRUE(rep.nonsingular());
  EXPECT_TRUE(std::isinf(rep.epsilon));
}

TEST(Classify, VerdictInvariantUnderConstantRescaling) {
  auto scaled_h3 = AlgebraD::validate(3, 2, {{1, 2, 3, 3.7}});
  ClassifyOptions opts;
  opts.samples = 5000;
  EXPECT_TRUE(classify(scaled_h3, opts).nonsingular());
  auto scaled_rxh3 = AlgebraD::validate(4, 3, {{1, 2, 4, 3.7}});
  EXPECT_TRUE(classify(scaled_rxh3, opts).singular());
}

TEST(Classify, VerdictInvariantUnderBasisConjugation) {
  // Transform the horizontal basis by random invertible T; the structure
  // constants pull back as c'_{ab} = sum_{i,j} T_{ia} T_{jb} c_{ij}.
  Rng rng(17);
  for (int rep = 0; rep < 4; ++rep) {
    Mat<double> T = linalg::zeros<double>(2, 2);
    do {
      for (auto& row : T)
        for (auto& x : row) x = rng.uniform(-2, 2);
    } while (std::fabs(T[0][0] * T[1][1] - T[0][1] * T[1][0]) < 0.3);
    const double c12 = T[0][0] * T[1][1] - T[1][0] * T[0][1];  // pullback of c=1
    auto alg = AlgebraD::validate(3, 2, {{1, 2, 3, c12}});
    ClassifyOptions opts;
    opts.samples = 4000;
    EXPECT_TRUE(classify(alg, opts).nonsingular());
  }
  // same game on the singular R x h3
  for (int rep = 0; rep < 3; ++rep) {
    // mix W into X: [X + aW, Y] = Z still, singular direction persists
    const double a = rng.uniform(-2, 2);
    auto alg = AlgebraD::validate(4, 3, {{1, 2, 4, 1.0}, {3, 2, 4, a}});
    ClassifyOptions opts;
    opts.samples = 4000;
    EXPECT_TRUE(classify(alg, opts).singular());
  }
}

TEST(AbnormalFromWitness, RTimesHeisenbergWitnessPasses) {
  auto alg = r_times_heisenberg_algebra();
  SpaceD space = SpaceD::standard(alg, NormD::l2(3));
  auto ab = abnormal_from_witness(space, {0, 0, 1}, {1}, 100);
  EXPECT_LE(ab.certification_residual, 1e-12);
  EXPECT_LE(ab.pmp2_residual, 1e-10);
  EXPECT_LE(ab.pmp3_residual, 1e-10);
  const auto chk = is_abnormal(*alg, ab.trajectory);
  EXPECT_TRUE(chk.abnormal);
  EXPECT_LE(chk.residual, 1e-12);
  // the straight path ends at exp(X0)
  const VecD end = ab.path.endpoint().coords();
  EXPECT_NEAR(end[2], 1.0, 1e-12);
}

TEST(AbnormalFromWitness, HeisenbergHasNoCertifiableWitness) {
  auto alg = heisenberg_algebra();
  SpaceD space = SpaceD::standard(alg, NormD::l2(2));
  try {
    abnormal_from_witness(space, {1, 0}, {1}, 10);
    FAIL() << "expected WitnessNotSingular";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WitnessNotSingular);
  }
}

TEST(AbnormalFromWitness, ProductWitnessCarriesSecondCenterCovector) {
  auto alg = heisenberg_squared_algebra();
  SpaceD space = SpaceD::standard(alg, NormD::l2(4));
  auto ab = abnormal_from_witness(space, {1, 0, 0, 0}, {0, 1}, 100);
  EXPECT_LE(ab.pmp2_residual, 1e-10);
  EXPECT_LE(ab.pmp3_residual, 1e-10);
}

// Lemma-style property: every Singular report's pair reproduces the
// vanishing-momenta condition along the constructed extremal.
TEST(SingularReports, WitnessPairSatisfiesMomentaVanishing) {
  const std::vector<AlgebraD::Handle> algebras = {r_times_heisenberg_algebra(),
                                                  heisenberg_squared_algebra()};
  for (const auto& alg : algebras) {
    ClassifyOptions opts;
    opts.samples = 8000;
    auto rep = classify(alg, opts);
    ASSERT_TRUE(rep.singular());
    SpaceD space = SpaceD::standard(alg, NormD::l2(alg->horizontal_dim()));
    auto ab = abnormal_from_witness(space, rep.witness, rep.covector, 100);
    double worst = 0.0;
    for (const auto& pt : ab.trajectory.points)
      worst = std::max(worst, vec::norm_inf(horizontal_momenta(*alg, pt.x, pt.xi)));
    EXPECT_LE(worst, 1e-10);
  }
}

}  // namespace
