#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace ddsafe::sdp {

/// One entry of a symmetric linear functional <A, X> = sum w * X(p, q).
struct AtomEntry {
  int p = 0;
  int q = 0;
  double w = 0.0;
};

/// Off-diagonal entries appear in both orders with equal weight, so the
/// matrix A of an atom is symmetric.
using Atom = std::vector<AtomEntry>;
using AtomSet = std::vector<Atom>;

struct PsdBlock {
  int size = 0;
  std::shared_ptr<const AtomSet> atoms;
  std::string label;
};

enum class ScalarKind { kFree, kNonneg };

struct ScalarVar {
  ScalarKind kind = ScalarKind::kFree;
  std::string label;
};

struct ScalarTerm {
  int var = 0;
  double coef = 0.0;
};

struct BlockTerm {
  int block = 0;
  int atom = 0;
  double coef = 0.0;
};

/// sum scalars + sum blocks (+ family contributions) == rhs.
struct EqualityRow {
  std::vector<ScalarTerm> scalars;
  std::vector<BlockTerm> blocks;
  double rhs = 0.0;
  std::string label;
};

/// Blocks sharing one atom set whose contributions factor as
/// row rows[j][a] += sum_i coef(i, j) <A_a, X_{members[i]}>; rows[j][a] = -1
/// means no contribution. Members may not appear in BlockTerms.
struct BlockFamily {
  std::vector<int> members;
  Eigen::MatrixXd coef;
  std::vector<std::vector<int>> rows;
};

/// minimize objective . scalars  subject to the equality rows, PSD blocks,
/// and nonnegative scalars.
struct ConicProblem {
  std::vector<PsdBlock> blocks;
  std::vector<ScalarVar> scalars;
  std::vector<EqualityRow> rows;
  std::vector<BlockFamily> families;
  Eigen::VectorXd objective;

  /// Throws StructuralError on out-of-range indices or shared family members.
  void validate() const;
  int max_block_size() const;
  bool empty() const { return blocks.empty() && scalars.empty() && rows.empty(); }
};

/// Sparse text dump with sections VARS, EQ (triplets), PSD, OBJ.
void write_debug_dump(std::ostream& out, const ConicProblem& problem);

enum class SolverStatus { kOptimal, kPrimalInfeasible, kDualInfeasible, kIterationLimit, kNumericalError };

std::string to_string(SolverStatus s);

struct SolverOptions {
  double tol_gap = 1e-9;
  double tol_feas = 1e-10;
  double tol_infeas = 1e-9;
  int max_iter = 120;
  bool verbose = false;
};

struct ConicSolution {
  SolverStatus status = SolverStatus::kNumericalError;
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> Z;
  Eigen::VectorXd scalars;
  Eigen::VectorXd scalar_duals;
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  /// Relative residuals at termination.
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  std::string message;
};

/// Adapter contract: one solve per problem instance, no incremental API.
/// Implementations must tolerate concurrent calls on different problems.
class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual std::string name() const = 0;
  virtual ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) const = 0;
};

/// Primal-dual path-following method: HKM search direction, Mehrotra
/// predictor-corrector, dense Schur complement with Cholesky, free scalars via
/// a bordered system, infeasibility detection from diverging iterates.
class InteriorPointSolver : public ConicSolver {
 public:
  std::string name() const override { return "ddsafe-ipm"; }
  ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) const override;
};

}  // namespace ddsafe::sdp
