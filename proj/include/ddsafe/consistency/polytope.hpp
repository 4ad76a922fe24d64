#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddsafe/consistency/dataset.hpp"
#include "ddsafe/lp/simplex.hpp"
#include "ddsafe/model/dictionary.hpp"
#include "ddsafe/model/disturbance.hpp"
#include "ddsafe/poly/polynomial.hpp"

namespace ddsafe::consistency {

struct IndexRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;
  Eigen::Index size() const { return end - begin; }
};

enum class FaceKind { kDataUpper, kDataLower, kDisturbance };

/// Origin of a polytope row: (sample, state component) for data rows, the
/// row of W for disturbance rows.
struct FaceTag {
  FaceKind kind = FaceKind::kDataUpper;
  int sample = -1;
  int index = 0;
};

/// {theta = (vec(F^T), vec(G^T), w) : N theta <= e}.
struct ConsistencyPolytope {
  Eigen::MatrixXd N;
  Eigen::VectorXd e;
  IndexRange f;
  IndexRange g;
  IndexRange w;
  std::vector<FaceTag> tags;

  Eigen::Index columns() const { return N.cols(); }
  Eigen::Index rows() const { return N.rows(); }
  /// Copy restricted to the given rows, in the given order.
  ConsistencyPolytope select_rows(const std::vector<int>& rows) const;
};

struct DataBlocks {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::VectorXd xi;
};

/// A = [I (x) phi(x_s)^T]_s, B = [I (x) u_s gamma(x_s)^T]_s, xi = [y_s]_s.
DataBlocks assemble_data_blocks(const Dataset& data, const model::Dictionary& dict);

/// N = [A B 0; -A -B 0; 0 0 W], e = [eps + xi; eps - xi; d_w].
ConsistencyPolytope assemble_P1(const Dataset& data, const model::Dictionary& dict,
                                const model::DisturbanceSet& W);

struct MembershipResult {
  bool member = false;
  /// max_i (N theta - e)_i; non-positive for members.
  double max_violation = 0.0;
};

MembershipResult membership(const ConsistencyPolytope& P, const Eigen::VectorXd& theta,
                            double tol = 1e-9);

/// Certificate that a removed row is implied by the rows kept at the time:
/// multipliers >= 0 on `support` with N_support^T y = N_row and
/// e_support . y = lp_max <= e_row + tol_red.
struct RedundancyCertificate {
  int row = -1;
  std::vector<int> support;
  Eigen::VectorXd multipliers;
  double lp_max = 0.0;
};

struct FaceReduction {
  ConsistencyPolytope polytope;
  std::vector<int> kept;
  std::vector<RedundancyCertificate> removed;
};

/// Incremental iterative-LP redundancy removal, rows visited in descending
/// slack at the Chebyshev center. Throws InconsistentDataError if empty.
FaceReduction reduce_faces(const ConsistencyPolytope& P, double tol_red = 1e-7);

/// Re-checks one certificate against the original polytope.
bool verify_redundancy_certificate(const ConsistencyPolytope& original,
                                   const RedundancyCertificate& cert, double tol_red = 1e-7);

/// Center and radius of the largest inscribed ball, or nullopt if the LP is
/// unbounded. Throws InconsistentDataError if the polytope is empty.
std::optional<std::pair<Eigen::VectorXd, double>> chebyshev_center(const ConsistencyPolytope& P);

/// True iff every coordinate is bounded above and below over P.
/// Throws InconsistentDataError if P is empty.
bool compactness_check(const ConsistencyPolytope& P);

struct OracleResult {
  double lp_max = 0.0;
  /// -rho(x) h(x) - lp_max; positive certifies containment at x.
  double margin = 0.0;
  Eigen::VectorXd maximizer;
};

/// LP side of the containment P1 within P2(x) test.
class ContainmentOracle {
 public:
  ContainmentOracle(ConsistencyPolytope P, poly::Polynomial rho, const poly::Polynomial& psi,
                    poly::Polynomial h, const model::Dictionary& dict);

  /// Throws NumericalError when the LP does not reach an optimum.
  OracleResult evaluate(std::span<const double> x) const;
  /// Evaluates many points on a thread pool; results in input order.
  std::vector<OracleResult> sweep(const std::vector<std::vector<double>>& points,
                                  unsigned threads = 0) const;

  const poly::PolyVector& r() const { return r_; }

 private:
  ConsistencyPolytope P_;
  poly::Polynomial rho_;
  poly::Polynomial h_;
  poly::PolyVector r_;
};

OracleResult containment_lp_oracle(const ConsistencyPolytope& P, const poly::Polynomial& rho,
                                   const poly::Polynomial& psi, const poly::Polynomial& h,
                                   const model::Dictionary& dict, std::span<const double> x);

/// Matrix-market style dump: header, block ranges, N as coordinate triplets, e.
void write_polytope_dump(std::ostream& out, const ConsistencyPolytope& P);

}  // namespace ddsafe::consistency
