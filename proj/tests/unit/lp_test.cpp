#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "ddsafe/lp/simplex.hpp"

using ddsafe::lp::feasible_point;
using ddsafe::lp::maximize;
using ddsafe::lp::Status;

namespace {

// Brute-force vertex enumeration for tiny bounded LPs.
std::optional<double> vertex_oracle(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                    const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  std::optional<double> best;
  std::vector<int> pick(n);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd S(n, n);
      Eigen::VectorXd r(n);
      for (int k = 0; k < n; ++k) {
        S.row(k) = A.row(pick[k]);
        r(k) = b(pick[k]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
      if (lu.rank() < n) return;
      Eigen::VectorXd x = lu.solve(r);
      if ((A * x - b).maxCoeff() > 1e-9) return;
      const double v = c.dot(x);
      if (!best || v > *best) best = v;
      return;
    }
    for (int i = start; i < m; ++i) {
      pick[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

Eigen::MatrixXd box_rows(int n) {
  Eigen::MatrixXd A(2 * n, n);
  A << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  return A;
}

}  // namespace

TEST(Simplex, UnitBoxMaximum) {
  const Eigen::MatrixXd A = box_rows(2);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(4);
  const auto r = maximize(A, b, Eigen::Vector2d(1.0, 2.0));
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.objective, 3.0, 1e-12);
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
  EXPECT_NEAR(r.x(1), 1.0, 1e-12);
}

TEST(Simplex, DetectsInfeasible) {
  Eigen::MatrixXd A(2, 1);
  A << 1.0, -1.0;
  const auto r = maximize(A, Eigen::Vector2d(-1.0, -1.0), Eigen::VectorXd::Ones(1));
  EXPECT_EQ(r.status, Status::kInfeasible);
  EXPECT_FALSE(feasible_point(A, Eigen::Vector2d(-1.0, -1.0)).has_value());
}

TEST(Simplex, DetectsUnbounded) {
  Eigen::MatrixXd A(1, 2);
  A << 1.0, 0.0;
  const auto r = maximize(A, Eigen::VectorXd::Ones(1), Eigen::Vector2d(0.0, 1.0));
  EXPECT_EQ(r.status, Status::kUnbounded);
}

TEST(Simplex, DegenerateDuplicatedRows) {
  Eigen::MatrixXd A(6, 2);
  A << 1, 0, 1, 0, 0, 1, 0, 1, -1, 0, 0, -1;
  Eigen::VectorXd b(6);
  b << 1, 1, 1, 1, 0, 0;
  const auto r = maximize(A, b, Eigen::Vector2d(1.0, 1.0));
  ASSERT_EQ(r.status, Status::kOptimal);
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
}

TEST(Simplex, RandomLpsMatchVertexOracleWithValidMultipliers) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> dims(1, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = dims(rng);
    const int extra = 1 + trial % 6;
    Eigen::MatrixXd A(2 * n + extra, n);
    Eigen::VectorXd b(2 * n + extra);
    A.topRows(2 * n) = box_rows(n);
    b.head(2 * n).setConstant(2.0);
    for (int i = 2 * n; i < A.rows(); ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = g(rng);
      b(i) = g(rng) + 0.5;
    }
    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j) c(j) = g(rng);
    const auto oracle = vertex_oracle(A, b, c);
    const auto r = maximize(A, b, c);
    if (!oracle) {
      EXPECT_EQ(r.status, Status::kInfeasible) << "trial " << trial;
      continue;
    }
    ASSERT_EQ(r.status, Status::kOptimal) << "trial " << trial;
    EXPECT_NEAR(r.objective, *oracle, 1e-8) << "trial " << trial;
    EXPECT_LE((A * r.x - b).maxCoeff(), 1e-9);
    EXPECT_GE(r.multipliers.minCoeff(), 0.0);
    EXPECT_LE((A.transpose() * r.multipliers - c).lpNorm<Eigen::Infinity>(), 1e-9);
    EXPECT_NEAR(b.dot(r.multipliers), r.objective, 1e-8);
  }
}

TEST(Simplex, FeasiblePointSatisfiesSystem) {
  Eigen::MatrixXd A(3, 2);
  A << -1, 0, 0, -1, 1, 1;
  Eigen::Vector3d b(-1.0, -1.0, 3.0);
  const auto x = feasible_point(A, b);
  ASSERT_TRUE(x.has_value());
  EXPECT_LE((A * *x - b).maxCoeff(), 1e-9);
}
