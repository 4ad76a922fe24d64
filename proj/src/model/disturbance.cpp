#include "ddsafe/model/disturbance.hpp"

#include "ddsafe/error.hpp"
#include "ddsafe/lp/simplex.hpp"

namespace ddsafe::model {

DisturbanceSet::DisturbanceSet(Eigen::MatrixXd W, Eigen::VectorXd d_w)
    : W_(std::move(W)), d_w_(std::move(d_w)) {
  if (W_.rows() != d_w_.size()) throw StructuralError("disturbance W and d_w sizes differ");
  const Eigen::Index n = W_.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (double sgn : {1.0, -1.0}) {
      const auto r = lp::maximize(W_, d_w_, sgn * Eigen::VectorXd::Unit(n, i));
      if (r.status == lp::Status::kInfeasible) throw ConfigError("disturbance set is empty");
      if (r.status != lp::Status::kOptimal) {
        throw ConfigError("disturbance set is unbounded along coordinate " + std::to_string(i));
      }
    }
  }
}

DisturbanceSet DisturbanceSet::linf_box(int n, double eps_w) {
  if (eps_w < 0.0) throw ConfigError("epsilon_w must be non-negative");
  Eigen::MatrixXd W(2 * n, n);
  W << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  return DisturbanceSet(std::move(W), Eigen::VectorXd::Constant(2 * n, eps_w));
}

bool DisturbanceSet::contains(const Eigen::VectorXd& w, double tol) const {
  return w.size() == W_.cols() && (W_ * w - d_w_).maxCoeff() <= tol;
}

}  // namespace ddsafe::model
