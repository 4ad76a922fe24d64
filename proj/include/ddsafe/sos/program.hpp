#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ddsafe/poly/polynomial.hpp"
#include "ddsafe/sdp/conic.hpp"
#include "ddsafe/sos/expr.hpp"
#include "ddsafe/sos/gram.hpp"

namespace ddsafe::sos {

enum class ScalarDomain { kFree, kNonneg };

/// Polynomial unknown with one free coefficient handle per basis monomial.
struct UnknownPoly {
  int id = 0;
  int n = 0;
  int degree = 0;
  std::vector<poly::Monomial> basis;
  std::vector<int> handles;

  PolyExpr expr() const;
};

/// Declared member of Sigma_d: v^T Q v with its own Gram block.
struct SosPoly {
  int id = 0;
  int block = 0;
  std::shared_ptr<const GramLayout> layout;

  PolyExpr expr() const;
};

/// `count` members of Sigma_d that enter constraints only through fixed
/// linear combinations (see PolyExpr::add_combo).
struct SosFamily {
  int id = 0;
  int count = 0;
  std::vector<int> blocks;
  std::shared_ptr<const GramLayout> layout;

  PolyExpr combo(const Eigen::VectorXd& weights) const;
};

struct Offender {
  std::string constraint;
  std::string monomial;
  double value = 0.0;
};

struct VerificationSummary {
  bool sound = false;
  double tol_feas = 1e-7;
  double tol_psd = 1e-8;
  double max_coefficient_residual = 0.0;
  double max_scalar_residual = 0.0;
  double min_eigenvalue = 0.0;
  /// Worst entries first, at most a handful.
  std::vector<Offender> worst_residuals;
  std::vector<Offender> worst_eigenvalues;
};

enum class SolveStatus { kFeasible, kInfeasibleCertified, kNumericalFailure };

std::string to_string(SolveStatus s);

struct SolveReport {
  SolveStatus status = SolveStatus::kNumericalFailure;
  std::vector<double> scalars;
  std::vector<Eigen::MatrixXd> grams;
  double objective = 0.0;
  /// Upper bound on the maximized objective from the dual iterate.
  double dual_bound = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  std::string solver;
  std::string message;
  std::optional<VerificationSummary> verification;
};

struct SolveOptions {
  sdp::SolverOptions solver;
  double tol_feas = 1e-7;
  double tol_psd = 1e-8;
};

struct ProgramStats {
  int scalar_unknowns = 0;
  int psd_blocks = 0;
  int max_block_size = 0;
  int equalities = 0;
};

class SosProgram {
 public:
  explicit SosProgram(int n);

  int dimension() const { return n_; }

  int declare_scalar(ScalarDomain domain, std::string label);
  UnknownPoly declare_poly(int degree, std::string label);
  SosPoly declare_sos(int degree, std::string label);
  SosFamily declare_sos_family(int count, int degree, std::string label);

  /// expression in Sigma_d. Throws StructuralError naming the first monomial
  /// of degree above 2d.
  int add_sos(const PolyExpr& expression, int d, std::string label);
  /// One scalar equality per monomial in the union of supports; returns the
  /// constraint id and its equality count.
  std::pair<int, int> add_coeff_equality(const PolyExpr& lhs, const PolyExpr& rhs, std::string label);
  /// sum terms == rhs over scalar handles.
  void add_scalar_equality(const std::map<int, double>& terms, double rhs, std::string label);
  /// sum terms <= rhs over scalar handles.
  void add_scalar_inequality(const std::map<int, double>& terms, double rhs, std::string label);
  /// Maximize sum weights * scalar; default is pure feasibility.
  void maximize(const std::map<int, double>& weights);
  /// Sum of Gram traces <= bound (homogeneous programs need it for a bounded optimum).
  void set_trace_bound(double bound);

  sdp::ConicProblem compile() const;
  ProgramStats stats() const;
  SolveReport solve(const sdp::ConicSolver& solver, const SolveOptions& options = {}) const;

  poly::Polynomial value(const UnknownPoly& p, const SolveReport& r) const;
  poly::Polynomial value(const SosPoly& p, const SolveReport& r) const;
  poly::Polynomial value(const SosFamily& f, int member, const SolveReport& r) const;
  poly::Polynomial value(const PolyExpr& e, const SolveReport& r) const;
  double scalar(int handle, const SolveReport& r) const;

  int sos_constraint_count() const { return static_cast<int>(blocks_.size()); }
  int scalar_count() const { return static_cast<int>(scalars_.size()); }

 private:
  friend VerificationSummary verify_certificate(const SosProgram&, const SolveReport&, double, double);

  struct Block {
    std::shared_ptr<const GramLayout> layout;
    std::string label;
    int family = -1;
  };
  struct Scalar {
    ScalarDomain domain;
    std::string label;
  };
  struct Identity {
    PolyExpr expr;  // must equal the Gram polynomial of `block` (or zero when block < 0)
    int block = -1;
    std::string label;
  };
  struct LinearRow {
    std::map<int, double> terms;
    double rhs = 0.0;
    bool inequality = false;
    std::string label;
  };

  std::shared_ptr<const GramLayout> layout(int degree);
  int new_block(int degree, std::string label, int family);
  std::vector<poly::Monomial> identity_support(const Identity& id) const;

  int n_;
  std::vector<Scalar> scalars_;
  std::vector<Block> blocks_;
  std::vector<SosFamily> families_;
  std::vector<Identity> identities_;
  std::vector<LinearRow> linear_;
  std::map<int, double> objective_;
  std::optional<double> trace_bound_;
  std::map<int, std::shared_ptr<const GramLayout>> layouts_;
  int next_poly_id_ = 0;
};

/// Independent check of every declared identity and PSD block.
VerificationSummary verify_certificate(const SosProgram& program, const SolveReport& report,
                                       double tol_feas = 1e-7, double tol_psd = 1e-8);

}  // namespace ddsafe::sos
