#include "carnot/algebra.hpp"

#include <gtest/gtest.h>

#include "carnot/rng.hpp"

using namespace carnot;

namespace {

VecQ q(std::initializer_list<double> xs) {
  VecQ v;
  for (double x : xs) v.emplace_back(x);
  return v;
}

TEST(AlgebraValidate, AcceptsHeisenberg) {
  auto alg = AlgebraD::validate(3, 2, {{1, 2, 3, 1.0}});
  EXPECT_EQ(alg->dim(), 3);
  EXPECT_EQ(alg->horizontal_dim(), 2);
  EXPECT_EQ(alg->central_dim(), 1);
  // closure stores both orders
  EXPECT_EQ(alg->terms().size(), 2u);
}

TEST(AlgebraValidate, RejectsAntisymmetryViolation) {
  try {
    AlgebraD::validate(3, 2, {{1, 2, 3, 1.0}, {2, 1, 3, 1.0}});
    FAIL() << "expected AntisymmetryViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AntisymmetryViolation);
  }
}

TEST(AlgebraValidate, RejectsNonTwoStepEntries) {
  try {
    AlgebraD::validate(3, 2, {{1, 3, 2, 1.0}});
    FAIL() << "expected NotTwoStep";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotTwoStep);
  }
}

TEST(AlgebraValidate, RejectsOutOfRangeIndices) {
  try {
    AlgebraD::validate(3, 2, {{1, 2, 5, 1.0}});
    FAIL() << "expected BadDimensions";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadDimensions);
  }
}

TEST(Bracket, HeisenbergGenerators) {
  auto alg = heisenberg_algebra();
  VecD x{1, 0, 0}, y{0, 1, 0};
  EXPECT_EQ(alg->bracket(x, y), (VecD{0, 0, 1}));
  EXPECT_EQ(alg->bracket(y, x), (VecD{0, 0, -1}));
}

TEST(Bracket, SelfBracketVanishes) {
  auto alg = heisenberg_algebra();
  VecD a{0.3, -1.7, 2.9};
  EXPECT_EQ(alg->bracket(a, a), (VecD{0, 0, 0}));
}

TEST(Bracket, BilinearExpansion) {
  auto alg = heisenberg_algebra();
  VecD a{1, 1, 0}, b{1, -1, 5};
  EXPECT_EQ(alg->bracket(a, b), (VecD{0, 0, -2}));
}

TEST(BchMultiply, HeisenbergGroupLaw) {
  auto alg = heisenberg_algebra();
  ElementD gx(alg, {1, 0, 0}), gy(alg, {0, 1, 0});
  EXPECT_EQ((gx * gy).coords(), (VecD{1, 1, 0.5}));
  EXPECT_EQ((gy * gx).coords(), (VecD{1, 1, -0.5}));
}

TEST(BchMultiply, IdentityIsNeutral) {
  auto alg = heisenberg_algebra();
  ElementD g(alg, {0.2, -0.7, 3.1});
  auto id = ElementD::identity(alg);
  EXPECT_EQ((g * id).coords(), g.coords());
  EXPECT_EQ((id * g).coords(), g.coords());
}

TEST(BchInverse, NegatesCoordinates) {
  auto alg = heisenberg_algebra();
  ElementD g(alg, {1, 1, 0.5});
  EXPECT_EQ(g.inverse().coords(), (VecD{-1, -1, -0.5}));
  EXPECT_TRUE(ElementD::identity(alg).inverse().is_identity());
  ElementD h(alg, {1, 2, 3});
  EXPECT_TRUE((h * h.inverse()).is_identity(1e-15));
}

TEST(GroupCommutator, MatchesBracketExponential) {
  auto alg = heisenberg_algebra();
  ElementD gx(alg, {1, 0, 0}), gy(alg, {0, 1, 0});
  EXPECT_EQ(group_commutator(gx, gy).coords(), (VecD{0, 0, 1}));
  ElementD a(alg, {2, 0, 7}), b(alg, {0, 3, -1});
  EXPECT_EQ(group_commutator(a, b).coords(), (VecD{0, 0, 6}));
  ElementD g(alg, {0.5, 1.5, -2.0});
  EXPECT_TRUE(group_commutator(g, g).is_identity(1e-15));
}

TEST(Dilate, ScalesByGrading) {
  auto alg = heisenberg_algebra();
  ElementD g(alg, {1, 1, 1});
  EXPECT_EQ(dilate(2.0, g).coords(), (VecD{2, 2, 4}));
  EXPECT_EQ(dilate(1.0, g).coords(), g.coords());
  EXPECT_THROW(dilate(0.0, g), Error);
}

TEST(ProjectPi, FirstCoordinates) {
  auto alg = heisenberg_algebra();
  ElementD g(alg, {1, 2, 3});
  EXPECT_EQ(project_pi(g), (VecD{1, 2}));
  EXPECT_EQ(project_pi(ElementD::identity(alg)), (VecD{0, 0}));
  ElementD z(alg, {0, 0, 9});
  EXPECT_EQ(project_pi(z), (VecD{0, 0}));
}

// Exactness suite: rational mode makes the group axioms equalities, not
// approximations.
TEST(RationalBackend, AssociativityExactOnRandomTriples) {
  auto alg = heisenberg_algebra_q();
  auto alg6 = AlgebraQ::validate(6, 4, {{1, 2, 5, 1.0}, {3, 4, 6, 1.0}});
  Rng rng(7);
  for (int round = 0; round < 1000; ++round) {
    const auto& a = round % 2 == 0 ? alg : alg6;
    auto rand_elem = [&]() {
      VecQ v;
      for (int i = 0; i < a->dim(); ++i)
        v.push_back(Rational(rng.uniform_int(-50, 50), rng.uniform_int(1, 9)));
      return ElementQ(a, v);
    };
    ElementQ g = rand_elem(), h = rand_elem(), k = rand_elem();
    EXPECT_EQ(((g * h) * k).coords(), (g * (h * k)).coords());
  }
}

TEST(RationalBackend, PiIsExactHomomorphism) {
  auto alg = heisenberg_algebra_q();
  Rng rng(11);
  for (int round = 0; round < 200; ++round) {
    VecQ a, b;
    for (int i = 0; i < 3; ++i) {
      a.push_back(Rational(rng.uniform_int(-20, 20), 7));
      b.push_back(Rational(rng.uniform_int(-20, 20), 3));
    }
    ElementQ g(alg, a), h(alg, b);
    EXPECT_EQ(project_pi(g * h), vec::add(project_pi(g), project_pi(h)));
  }
}

TEST(RationalBackend, DilationComposesExactly) {
  auto alg = heisenberg_algebra_q();
  ElementQ g(alg, q({3, -2, 7}));
  const Rational s(3, 2), t(5, 7);
  EXPECT_EQ(dilate(s, dilate(t, g)).coords(), dilate(Rational(s * t), g).coords());
}

TEST(RationalBackend, DilationIsAutomorphism) {
  auto alg = heisenberg_algebra_q();
  Rng rng(13);
  for (int round = 0; round < 100; ++round) {
    VecQ a, b;
    for (int i = 0; i < 3; ++i) {
      a.push_back(Rational(rng.uniform_int(-9, 9), 2));
      b.push_back(Rational(rng.uniform_int(-9, 9), 5));
    }
    ElementQ g(alg, a), h(alg, b);
    const Rational t(7, 3);
    EXPECT_EQ(dilate(t, g * h).coords(), (dilate(t, g) * dilate(t, h)).coords());
  }
}

TEST(RationalBackend, CommutatorMatchesBracketExactly) {
  auto alg = AlgebraQ::validate(4, 3, {{1, 2, 4, 1.0}});
  Rng rng(17);
  for (int round = 0; round < 100; ++round) {
    VecQ a, b;
    for (int i = 0; i < 4; ++i) {
      a.push_back(Rational(rng.uniform_int(-6, 6)));
      b.push_back(Rational(rng.uniform_int(-6, 6)));
    }
    ElementQ g(alg, a), h(alg, b);
    EXPECT_EQ(group_commutator(g, h).coords(), vec::add(vec::zero<Rational>(4), alg->bracket(a, b)));
  }
}

TEST(RationalBackend, CentralElementsCommute) {
  auto alg = heisenberg_algebra_q();
  ElementQ g(alg, q({1, 2, 3})), z(alg, q({0, 0, 5}));
  EXPECT_EQ((g * z).coords(), (z * g).coords());
}

TEST(DoubleBackend, AssociativityWithinTolerance) {
  auto alg = heisenberg_squared_algebra();
  Rng rng(23);
  for (int round = 0; round < 1000; ++round) {
    VecD a(6), b(6), c(6);
    for (int i = 0; i < 6; ++i) {
      a[i] = rng.uniform(-5, 5);
      b[i] = rng.uniform(-5, 5);
      c[i] = rng.uniform(-5, 5);
    }
    ElementD g(alg, a), h(alg, b), k(alg, c);
    const VecD lhs = ((g * h) * k).coords();
    const VecD rhs = (g * (h * k)).coords();
    for (int i = 0; i < 6; ++i)
      EXPECT_NEAR(lhs[i], rhs[i], 1e-12 * (1.0 + std::fabs(lhs[i])));
  }
}

}  // namespace
