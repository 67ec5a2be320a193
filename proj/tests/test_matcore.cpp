#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "sqc/matcore.hpp"

using sqc::Mat;

namespace {

Mat ones_at(int m, int n, std::initializer_list<std::pair<int, int>> cells) {
  Mat x = Mat::Zero(m, n);
  for (auto [i, j] : cells) x(i - 1, j - 1) = 1.0;
  return x;
}

Mat gaussian(int m, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat x(m, n);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return x;
}

}  // namespace

TEST(Base4x3, MatchesDisplay) {
  const auto b = sqc::build_base_4x3();
  EXPECT_EQ(b.v1(), ones_at(4, 3, {{1, 1}, {2, 2}}));
  EXPECT_EQ(b.v2(), ones_at(4, 3, {{1, 2}, {3, 3}}));
  EXPECT_EQ(b.v3(), ones_at(4, 3, {{3, 2}, {4, 1}, {4, 2}, {4, 3}}));
}

TEST(Base4x3, GramIsDiag224) {
  const auto b = sqc::build_base_4x3();
  Eigen::Matrix3d expected = Eigen::Vector3d(2, 2, 4).asDiagonal();
  EXPECT_EQ(b.gram(), expected);
}

TEST(BaseN, FourByFiveMatchesDisplay) {
  const auto b = sqc::build_base_n(4, 5);
  EXPECT_EQ(b.v1(), ones_at(5, 4, {{1, 1}, {2, 2}, {4, 4}}));
  EXPECT_EQ(b.v2(), ones_at(5, 4, {{1, 2}, {3, 3}}));
  EXPECT_EQ(b.v3(), ones_at(5, 4, {{3, 2}, {4, 1}, {4, 2}, {4, 3}, {5, 4}}));
}

TEST(BaseN, BaseCaseIsTheFourByThree) {
  const auto a = sqc::build_base_n(3, 4);
  const auto b = sqc::build_base_4x3();
  for (int i = 0; i < 3; ++i) EXPECT_EQ(a.v(i), b.v(i));
}

TEST(BaseN, ComboAgreesWithDisplays) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto b4 = sqc::build_base_n(4, 5);
  const auto b5 = sqc::build_base_n(5, 6);
  const auto b5alt = sqc::build_base_n(5, 6, sqc::DiagRule::parse("21"));
  for (int trial = 0; trial < 100; ++trial) {
    const double a1 = normal(rng), a2 = normal(rng), a3 = normal(rng);
    const sqc::Vec3 alpha(a1, a2, a3);
    EXPECT_EQ(sqc::combo(b4, alpha), oracle::m4_display(a1, a2, a3));
    EXPECT_EQ(sqc::combo(b5, alpha), oracle::m5_display(a1, a2, a3, a1, a1));
    EXPECT_EQ(sqc::combo(b5alt, alpha), oracle::m5_display(a1, a2, a3, a2, a1));
  }
}

TEST(BaseN, AlphaTwoVariantMovesTheDiagonal) {
  const auto b = sqc::build_base_n(4, 5, sqc::DiagRule::all(sqc::DiagSlot::alpha2));
  EXPECT_EQ(b.v1()(3, 3), 0.0);
  EXPECT_EQ(b.v2()(3, 3), 1.0);
}

TEST(BaseN, PadsZeroRowsAtTheBottom) {
  const auto b = sqc::build_base_n(4, 8);
  const auto tight = sqc::build_base_n(4, 5);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(b.v(i).rows(), 8);
    EXPECT_EQ(b.v(i).topRows(5), tight.v(i));
    EXPECT_TRUE(b.v(i).bottomRows(3).isZero(0.0));
  }
}

TEST(BaseN, RejectsBadDimensions) {
  EXPECT_THROW(sqc::build_base_n(2, 3), sqc::DimensionError);
  EXPECT_THROW(sqc::build_base_n(4, 4), sqc::DimensionError);
}

TEST(BaseN, CanonicalGramIsDiagonal) {
  for (int n = 3; n <= 7; ++n) {
    for (auto rule : {sqc::DiagSlot::alpha1, sqc::DiagSlot::alpha2}) {
      const auto b = sqc::build_base_n(n, n + 1, sqc::DiagRule::all(rule));
      const Eigen::Matrix3d g = b.gram();
      EXPECT_TRUE(g.isDiagonal(0.0)) << "n = " << n;
    }
  }
}

TEST(BaseN, GeneratorsSatisfyRankDeficiency) {
  for (int n = 3; n <= 7; ++n) {
    const auto b = sqc::build_base_n(n, n + 1);
    for (int i = 0; i < 3; ++i) EXPECT_LE(oracle::integer_rank(b.v(i)), n - 1);
  }
}

TEST(DiagRule, ParsesAndRejects) {
  EXPECT_EQ(sqc::DiagRule::parse("alpha2").at(7), sqc::DiagSlot::alpha2);
  const auto r = sqc::DiagRule::parse("12");
  EXPECT_EQ(r.at(4), sqc::DiagSlot::alpha1);
  EXPECT_EQ(r.at(5), sqc::DiagSlot::alpha2);
  EXPECT_EQ(r.at(9), sqc::DiagSlot::alpha2);
  EXPECT_EQ(r.to_string(), "12");
  EXPECT_THROW(sqc::DiagRule::parse("13"), sqc::PreconditionError);
}

TEST(SpanBasisTest, RejectsDependentGenerators) {
  const auto b = sqc::build_base_4x3();
  EXPECT_THROW(sqc::SpanBasis(b.v1(), b.v2(), b.v1() + b.v2()), sqc::DegenerateBasisError);
  EXPECT_THROW(sqc::SpanBasis(b.v1(), b.v2(), Mat::Zero(3, 3)), sqc::DimensionError);
}

TEST(Combo, BasisVectorsAndZero) {
  const auto b = sqc::build_base_4x3();
  EXPECT_EQ(sqc::combo(b, sqc::Vec3(1, 0, 0)), b.v1());
  EXPECT_TRUE(sqc::combo(b, sqc::Vec3(0, 0, 0)).isZero(0.0));
  const auto b4 = sqc::build_base_n(4, 5);
  const Mat m = sqc::combo(b4, sqc::Vec3(0.3, -0.7, 1.9));
  EXPECT_EQ(m(3, 3), 0.3);
  EXPECT_EQ(m(4, 3), 1.9);
}

TEST(Coords, KnownPoints) {
  const auto b = sqc::build_base_4x3();
  const auto e2 = sqc::coords(b, b.v2());
  EXPECT_NEAR(e2.eta1, 0.0, 1e-15);
  EXPECT_NEAR(e2.eta2, 1.0, 1e-15);
  EXPECT_NEAR(e2.eta3, 0.0, 1e-15);
  const auto mix = sqc::coords(b, b.v1() + 2.0 * b.v3());
  EXPECT_NEAR(mix.eta1, 1.0, 1e-15);
  EXPECT_NEAR(mix.eta2, 0.0, 1e-15);
  EXPECT_NEAR(mix.eta3, 2.0, 1e-15);
}

TEST(Coords, OrthogonalComplementMapsToZero) {
  const auto b = sqc::build_base_4x3();
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Mat x = oracle::orthogonal_complement_sample({b.v1(), b.v2(), b.v3()}, rng);
    const auto eta = sqc::coords(b, x);
    EXPECT_NEAR(eta.eta1, 0.0, 1e-13);
    EXPECT_NEAR(eta.eta2, 0.0, 1e-13);
    EXPECT_NEAR(eta.eta3, 0.0, 1e-13);
    EXPECT_LE(sqc::project(b, x).norm(), 1e-13 * x.norm());
  }
}

TEST(Coords, NonOrthogonalBasisUsesGramSolve) {
  const auto base = sqc::build_base_4x3();
  const sqc::SpanBasis skew(base.v1(), base.v2() + 0.5 * base.v1(), base.v3() - 0.25 * base.v2());
  const Mat x = 1.5 * skew.v1() - 2.0 * skew.v2() + 0.75 * skew.v3();
  const auto eta = sqc::coords(skew, x);
  EXPECT_NEAR(eta.eta1, 1.5, 1e-13);
  EXPECT_NEAR(eta.eta2, -2.0, 1e-13);
  EXPECT_NEAR(eta.eta3, 0.75, 1e-13);
}

TEST(Coords, RejectsShapeMismatch) {
  const auto b = sqc::build_base_4x3();
  EXPECT_THROW(sqc::coords(b, Mat::Zero(5, 4)), sqc::DimensionError);
}

TEST(Project, FixedPointsIdempotenceAndSelfAdjointness) {
  std::mt19937_64 rng(5);
  for (int n = 3; n <= 5; ++n) {
    const auto b = sqc::build_base_n(n, n + 2);
    EXPECT_LE((sqc::project(b, b.v3()) - b.v3()).norm(), 1e-14);
    for (int t = 0; t < 200; ++t) {
      const Mat x = gaussian(n + 2, n, rng);
      const Mat y = gaussian(n + 2, n, rng);
      const Mat px = sqc::project(b, x);
      EXPECT_LE((sqc::project(b, px) - px).norm(), 1e-12 * (1.0 + x.norm()));
      EXPECT_NEAR(sqc::frob_dot(px, y), sqc::frob_dot(x, sqc::project(b, y)), 1e-12 * x.norm() * y.norm());
      const auto eta = sqc::coords(b, x);
      EXPECT_LE((sqc::combo(b, eta) - px).norm(), 1e-12 * x.norm());
    }
  }
}

TEST(FrobeniusProperty, CauchySchwarz) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 500; ++t) {
    const Mat x = gaussian(4, 3, rng);
    const Mat y = gaussian(4, 3, rng);
    EXPECT_LE(std::abs(sqc::frob_dot(x, y)), sqc::frob_norm(x) * sqc::frob_norm(y) * (1 + 1e-15));
  }
}

TEST(Cubic, Values) {
  EXPECT_EQ(sqc::f_L({1, 1, 1}), -1.0);
  EXPECT_EQ(sqc::f_L({2.5, 0, -7}), 0.0);
  EXPECT_EQ(sqc::f_L({2, 3, -1}), 6.0);
}

TEST(Cubic, HomogeneousOfDegreeThreeOnL) {
  const auto b = sqc::build_base_4x3();
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const Mat x = sqc::combo(b, sqc::Vec3(normal(rng), normal(rng), normal(rng)));
    const double s = 3.0 * normal(rng);
    const double base = sqc::f_L(sqc::coords(b, x));
    EXPECT_NEAR(sqc::f_L(sqc::coords(b, s * x)), s * s * s * base, 1e-12 * (1.0 + std::abs(s * s * s * base)));
  }
}

TEST(Extension, ClosedFormValues) {
  const auto b = sqc::build_base_4x3();
  const sqc::ExtensionParams p{0.3, 7.0};
  EXPECT_EQ(sqc::F_ext(b, p, Mat::Zero(4, 3)), 0.0);
  EXPECT_NEAR(sqc::F_ext(b, p, b.v1()), 0.3 * 2 + 0.3 * 4, 1e-14);
  std::mt19937_64 rng(1);
  Mat x = oracle::orthogonal_complement_sample({b.v1(), b.v2(), b.v3()}, rng);
  x /= x.norm();
  EXPECT_NEAR(sqc::F_ext(b, p, x), 2 * 0.3 + 7.0, 1e-12);
}

TEST(Extension, PenaltyVanishesOnL) {
  const auto b = sqc::build_base_n(4, 5);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const sqc::Vec3 eta(normal(rng), normal(rng), normal(rng));
    const Mat x = sqc::combo(b, eta);
    const double n2 = x.squaredNorm();
    const double expected = -eta(0) * eta(1) * eta(2) + 0.1 * n2 + 0.1 * n2 * n2;
    EXPECT_NEAR(sqc::F_ext(b, {0.1, 1e3}, x), expected, 1e-12 * (1.0 + n2 * n2));
  }
}

TEST(Extension, QuarticGrowth) {
  const auto b = sqc::build_base_4x3();
  std::mt19937_64 rng(4);
  const sqc::ExtensionParams p{0.05, 3.0};
  for (int t = 0; t < 50; ++t) {
    Mat x = gaussian(4, 3, rng);
    x /= x.norm();
    const double s = 1e3;
    EXPECT_NEAR(sqc::F_ext(b, p, s * x) / std::pow(s, 4), p.epsilon, 0.01 * p.epsilon);
  }
}

TEST(Extension, RejectsBadParams) {
  EXPECT_THROW((sqc::ExtensionParams{0.0, 1.0}.validate()), sqc::PreconditionError);
  EXPECT_THROW((sqc::ExtensionParams{0.1, -1.0}.validate()), sqc::PreconditionError);
  EXPECT_THROW((sqc::ExtensionParams{std::nan(""), 1.0}.validate()), sqc::PreconditionError);
}

TEST(HessForm, SpecialDirections) {
  const auto b = sqc::build_base_4x3();
  const sqc::ExtensionParams p{0.02, 40.0};
  const Mat zero = Mat::Zero(4, 3);
  Mat in_l = b.v1() + b.v2() - 0.5 * b.v3();
  in_l /= in_l.norm();
  EXPECT_NEAR(sqc::hess_form_F(b, p, zero, in_l), 2 * p.epsilon, 1e-14);
  std::mt19937_64 rng(2);
  Mat off = oracle::orthogonal_complement_sample({b.v1(), b.v2(), b.v3()}, rng);
  off /= off.norm();
  EXPECT_NEAR(sqc::hess_form_F(b, p, zero, off), 2 * p.epsilon + 2 * p.k, 1e-12);
}

TEST(HessForm, EvenAndQuadraticInDirection) {
  const auto b = sqc::build_base_n(4, 5);
  const sqc::ExtensionParams p{0.01, 5.0};
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const Mat a = gaussian(5, 4, rng);
    const Mat y = gaussian(5, 4, rng);
    const double h = sqc::hess_form_F(b, p, a, y);
    EXPECT_EQ(h, sqc::hess_form_F(b, p, a, -y));
    EXPECT_NEAR(sqc::hess_form_F(b, p, a, 3.0 * y), 9.0 * h, 1e-12 * (1.0 + std::abs(9.0 * h)));
  }
}

// Finite-difference oracle on 1000 pairs each for n = 3 and n = 4.
TEST(HessForm, MatchesFiniteDifferences) {
  for (int n : {3, 4}) {
    const auto b = sqc::build_base_n(n, n + 1);
    const sqc::ExtensionParams p{0.005, 250.0};
    std::mt19937_64 rng(100 + n);
    const auto F = [&](const Mat& x) { return sqc::F_ext(b, p, x); };
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
      const Mat a = gaussian(n + 1, n, rng);
      Mat y = gaussian(n + 1, n, rng);
      y /= y.norm();
      const double exact = sqc::hess_form_F(b, p, a, y);
      const double fd = oracle::second_difference(F, a, y, 1e-2);
      EXPECT_LE(std::abs(fd - exact), 1e-6 * std::max(1.0, std::abs(exact))) << "n=" << n << " t=" << t;
      ++checked;
    }
    EXPECT_EQ(checked, 1000);
  }
}
