#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace ddsafe::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string to_string(Status s);

struct Options {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-10;
  int max_iterations = 100000;
};

struct Result {
  Status status = Status::kIterationLimit;
  /// max c.x when optimal.
  double objective = 0.0;
  /// Maximizer (a vertex of {A x <= b}) when optimal.
  Eigen::VectorXd x;
  /// Dual certificate y >= 0 with A^T y = c and b.y == objective when optimal.
  Eigen::VectorXd multipliers;
  int iterations = 0;
};

/// maximize c.x  subject to  A x <= b,  x free.
///
/// Solved through its dual  min b.y  s.t.  A^T y = c, y >= 0  by a two-phase
/// revised simplex (Dantzig pricing, Bland's rule after degenerate streaks,
/// basis refactorized every iteration). Safe to call concurrently.
Result maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                const Options& options = {});

/// Some x with A x <= b, or nullopt when the system is infeasible.
std::optional<Eigen::VectorXd> feasible_point(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                              const Options& options = {});

}  // namespace ddsafe::lp
