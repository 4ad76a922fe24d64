#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cstdlib>
#include <random>
#include <sstream>

#include "ddsafe/error.hpp"
#include "ddsafe/sdp/conic.hpp"

using namespace ddsafe;
using namespace ddsafe::sdp;

namespace {

// Atom (p, q) per unordered pair; value X(p,p) or 2 X(p,q).
std::shared_ptr<const AtomSet> pair_atoms(int s) {
  auto set = std::make_shared<AtomSet>();
  for (int p = 0; p < s; ++p)
    for (int q = p; q < s; ++q) {
      Atom a{{p, q, 1.0}};
      if (p != q) a.push_back({q, p, 1.0});
      set->push_back(a);
    }
  return set;
}

int pair_index(int s, int p, int q) {
  int idx = 0;
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j) {
      if (i == p && j == q) return idx;
      ++idx;
    }
  return -1;
}

Eigen::MatrixXd random_sym(int s, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd A(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) A(i, j) = nd(rng);
  return 0.5 * (A + A.transpose());
}

// maximize t subject to C - t I = X, X PSD; optimum is lambda_min(C).
ConicProblem min_eig_problem(const Eigen::MatrixXd& C) {
  const int s = static_cast<int>(C.rows());
  ConicProblem P;
  P.blocks.push_back({s, pair_atoms(s), "X"});
  P.scalars.push_back({ScalarKind::kFree, "t"});
  P.objective = Eigen::VectorXd::Constant(1, -1.0);
  for (int p = 0; p < s; ++p)
    for (int q = p; q < s; ++q) {
      EqualityRow row;
      row.blocks.push_back({0, pair_index(s, p, q), 1.0});
      if (p == q) row.scalars.push_back({0, 1.0});
      row.rhs = p == q ? C(p, p) : 2.0 * C(p, q);
      P.rows.push_back(row);
    }
  return P;
}

}  // namespace

TEST(Ipm, SmallLpMatchesClosedForm) {
  // min x1 + x2 s.t. x1 + 2 x2 = 1, x >= 0  ->  x = (0, 0.5).
  ConicProblem P;
  P.scalars = {{ScalarKind::kNonneg, "x1"}, {ScalarKind::kNonneg, "x2"}};
  P.objective = Eigen::Vector2d(1.0, 1.0);
  P.rows.push_back({{{0, 1.0}, {1, 2.0}}, {}, 1.0, "r"});
  const auto sol = InteriorPointSolver().solve(P, {});
  ASSERT_EQ(sol.status, SolverStatus::kOptimal) << sol.message;
  EXPECT_NEAR(sol.primal_objective, 0.5, 1e-8);
  EXPECT_NEAR(sol.scalars(1), 0.5, 1e-7);
  EXPECT_NEAR(sol.y(0), 0.5, 1e-7);
}

TEST(Ipm, MinimumEigenvalueOfRandomMatrices) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int s = 2 + trial % 5;
    const Eigen::MatrixXd C = random_sym(s, rng);
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(C).eigenvalues().minCoeff();
    const auto sol = InteriorPointSolver().solve(min_eig_problem(C), {});
    ASSERT_EQ(sol.status, SolverStatus::kOptimal) << sol.message;
    EXPECT_NEAR(sol.scalars(0), lmin, 1e-7);
    EXPECT_NEAR(sol.dual_objective, -lmin, 1e-7);
  }
}

TEST(Ipm, DetectsPrimalInfeasibility) {
  // X PSD with X(0,0) = -1.
  ConicProblem P;
  P.blocks.push_back({2, pair_atoms(2), "X"});
  P.objective = Eigen::VectorXd(0);
  P.rows.push_back({{}, {{0, 0, 1.0}}, -1.0, "r"});
  const auto sol = InteriorPointSolver().solve(P, {});
  EXPECT_EQ(sol.status, SolverStatus::kPrimalInfeasible) << sol.message;
}

TEST(Ipm, DetectsDualInfeasibility) {
  // min -x s.t. x - y = 0, x, y >= 0 is unbounded.
  ConicProblem P;
  P.scalars = {{ScalarKind::kNonneg, "x"}, {ScalarKind::kNonneg, "y"}};
  P.objective = Eigen::Vector2d(-1.0, 0.0);
  P.rows.push_back({{{0, 1.0}, {1, -1.0}}, {}, 0.0, "r"});
  const auto sol = InteriorPointSolver().solve(P, {});
  EXPECT_EQ(sol.status, SolverStatus::kDualInfeasible) << sol.message;
}

TEST(Ipm, FamilyEncodingMatchesPlainTerms) {
  // Rows (j, a): sum_i coef(i, j) <A_a, X_i> + t [a diagonal] = B_j(a).
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  const int s = 3;
  const int members = 4;
  const int cols = 2;
  auto atoms = pair_atoms(s);
  const int na = static_cast<int>(atoms->size());
  Eigen::MatrixXd coef(members, cols);
  for (int i = 0; i < members; ++i)
    for (int j = 0; j < cols; ++j) coef(i, j) = 0.5 + std::abs(nd(rng));
  std::vector<Eigen::MatrixXd> B;
  for (int j = 0; j < cols; ++j) B.push_back(random_sym(s, rng));

  auto build = [&](bool family) {
    ConicProblem P;
    for (int i = 0; i < members; ++i) P.blocks.push_back({s, atoms, "Y" + std::to_string(i)});
    P.scalars.push_back({ScalarKind::kFree, "t"});
    P.objective = Eigen::VectorXd::Constant(1, -1.0);
    BlockFamily fam;
    for (int i = 0; i < members; ++i) fam.members.push_back(i);
    fam.coef = coef;
    fam.rows.assign(cols, std::vector<int>(static_cast<std::size_t>(na), -1));
    for (int j = 0; j < cols; ++j)
      for (int p = 0; p < s; ++p)
        for (int q = p; q < s; ++q) {
          const int a = pair_index(s, p, q);
          EqualityRow row;
          if (p == q) row.scalars.push_back({0, 1.0});
          row.rhs = p == q ? B[j](p, p) : 2.0 * B[j](p, q);
          if (family) {
            fam.rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(a)] = static_cast<int>(P.rows.size());
          } else {
            for (int i = 0; i < members; ++i) row.blocks.push_back({i, a, coef(i, j)});
          }
          P.rows.push_back(row);
        }
    if (family) P.families.push_back(fam);
    return P;
  };
  SolverOptions vo; vo.verbose = std::getenv("IPM_VERBOSE") != nullptr;
  const auto plain = InteriorPointSolver().solve(build(false), vo);
  const auto fam = InteriorPointSolver().solve(build(true), vo);
  ASSERT_EQ(plain.status, fam.status);
  ASSERT_EQ(plain.status, SolverStatus::kOptimal) << plain.message;
  EXPECT_NEAR(plain.primal_objective, fam.primal_objective, 1e-7);
  EXPECT_EQ(plain.iterations, fam.iterations);
  // Positive weights bound t by the smallest eigenvalue over the B_j.
  double bound = 1e300;
  for (const auto& Bj : B) bound = std::min(bound, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Bj).eigenvalues().minCoeff());
  EXPECT_LE(fam.scalars(0), bound + 1e-7);
}

TEST(Ipm, ValidateRejectsBadIndices) {
  ConicProblem P;
  P.blocks.push_back({2, pair_atoms(2), "X"});
  P.objective = Eigen::VectorXd(0);
  P.rows.push_back({{}, {{0, 9, 1.0}}, 0.0, "r"});
  EXPECT_THROW(P.validate(), StructuralError);
  P.rows.back().blocks.front() = {3, 0, 1.0};
  EXPECT_THROW(P.validate(), StructuralError);
  P.rows.back().blocks.front() = {0, 0, 1.0};
  P.objective = Eigen::VectorXd(2);
  EXPECT_THROW(P.validate(), StructuralError);
}

TEST(Ipm, DebugDumpIsDeterministic) {
  std::mt19937_64 rng(3);
  const auto P = min_eig_problem(random_sym(3, rng));
  std::ostringstream a, b;
  write_debug_dump(a, P);
  write_debug_dump(b, P);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a.str().find("VARS 1"), std::string::npos);
  EXPECT_NE(a.str().find("PSD 1"), std::string::npos);
  EXPECT_NE(a.str().find("EQ 6 9"), std::string::npos);
  EXPECT_NE(a.str().find("OBJ\n0 -1"), std::string::npos);
}
