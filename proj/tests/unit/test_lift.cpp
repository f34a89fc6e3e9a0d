#include <random>

#include <gtest/gtest.h>

#include "dimlift/error.hpp"
#include "dimlift/lift.hpp"

using namespace dimlift;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<long>(v.size()));
  long i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXd random_positive(long n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

}  // namespace

TEST(Kronecker, EntryFormula) {
  EXPECT_EQ(kronecker(vec({1, 2}), vec({3, 4})), vec({3, 4, 6, 8}));
  EXPECT_EQ(kronecker(vec({1, 0}), vec({3, 4})), vec({3, 4, 0, 0}));
  EXPECT_EQ(kronecker(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(5)).size(), 15);
}

TEST(Kronecker, EmptyInput) {
  try {
    kronecker(Eigen::VectorXd(), vec({1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension);
  }
}

TEST(Kronecker, NormIsMultiplicative) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd a(3 + trial % 5), b(2 + trial % 7);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    EXPECT_NEAR(kronecker(a, b).norm(), a.norm() * b.norm(), 1e-12 * a.norm() * b.norm());
  }
}

TEST(Kronecker, Associative) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  Eigen::VectorXd a(3), b(4), c(2);
  for (auto* v : {&a, &b, &c})
    for (auto& x : *v) x = g(rng);
  const Eigen::VectorXd left = kronecker(kronecker(a, b), c);
  const Eigen::VectorXd right = kronecker(a, kronecker(b, c));
  EXPECT_TRUE(left.isApprox(right, 1e-15));
}

TEST(NormalizeSegment, Examples) {
  const auto v = normalize_segment(vec({3, 4}));
  EXPECT_DOUBLE_EQ(v(0), 0.6);
  EXPECT_DOUBLE_EQ(v(1), 0.8);
  EXPECT_EQ(normalize_segment(vec({0, 1})), vec({0, 1}));
}

TEST(NormalizeSegment, ZeroNamesSegmentAndTime) {
  try {
    normalize_segment(vec({0, 0}), 1, 417);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::normalization);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("segment 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("t=417"), std::string::npos) << msg;
  }
}

TEST(LiftColumn, BasisSegments) {
  EXPECT_EQ(lift_column(vec({1, 0, 0, 1}), LiftConfig{2, 2}), vec({0, 1, 0, 0}));
}

TEST(LiftColumn, Dimensions) {
  EXPECT_EQ(lift_column(Eigen::VectorXd::Ones(28), LiftConfig{2, 14}).size(), 196);
  EXPECT_EQ(lift_column(Eigen::VectorXd::Ones(54), LiftConfig{2, 27}).size(), 729);
  EXPECT_EQ(lift_column(Eigen::VectorXd::Ones(12), LiftConfig{3, 4}).size(), 64);
}

TEST(LiftColumn, WrongFactorization) {
  try {
    lift_column(Eigen::VectorXd::Ones(28), LiftConfig{3, 9});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::dimension);
  }
}

TEST(LiftColumn, ZeroSegmentPropagates) {
  try {
    lift_column(vec({1, 2, 0, 0}), LiftConfig{2, 2}, 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::normalization);
  }
}

TEST(LiftColumn, UnitNormAndScaleInvariance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::VectorXd d = random_positive(28, rng);
    const Eigen::VectorXd l = lift_column(d, LiftConfig{2, 14});
    EXPECT_NEAR(l.norm(), 1.0, 1e-12);
    const Eigen::VectorXd scaled = lift_column(3.7 * d, LiftConfig{2, 14});
    EXPECT_TRUE(scaled.isApprox(l, 1e-14));
  }
}

TEST(LiftColumn, PermutationReordersChannels) {
  const LiftConfig swapped{2, 2, 4096, {2, 3, 0, 1}};
  EXPECT_EQ(lift_column(vec({0, 1, 1, 0}), swapped), lift_column(vec({1, 0, 0, 1}), LiftConfig{2, 2}));
}

TEST(LiftMatrix, ShapeAndScale) {
  std::mt19937_64 rng(8);
  Eigen::MatrixXd v(28, 1000);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  for (long j = 0; j < v.cols(); ++j)
    for (long i = 0; i < v.rows(); ++i) v(i, j) = u(rng);
  const SpatioTemporalMatrix d(v);
  const auto unit = lift_matrix(d, LiftConfig{2, 14}, ScaleMode::unit_norm);
  EXPECT_EQ(unit.dim(), 196);
  EXPECT_EQ(unit.samples(), 1000);
  const auto root = lift_matrix(d, LiftConfig{2, 14}, ScaleMode::sqrt_dim);
  for (long j = 0; j < 1000; ++j) {
    EXPECT_NEAR(unit.values().col(j).norm(), 1.0, 1e-12);
    EXPECT_NEAR(root.values().col(j).norm(), 14.0, 14.0 * 1e-9);
  }
}

TEST(LiftMatrix, FailureNamesTime) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Ones(4, 5);
  v.col(3).head(2).setZero();
  try {
    lift_matrix(SpatioTemporalMatrix(v, 10), LiftConfig{2, 2}, ScaleMode::unit_norm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("t=13"), std::string::npos) << e.what();
  }
}
