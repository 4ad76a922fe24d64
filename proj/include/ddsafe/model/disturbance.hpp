#pragma once

#include <Eigen/Dense>

namespace ddsafe::model {

/// Polytope {w : W w <= d_w}. Construction verifies it is nonempty and bounded.
class DisturbanceSet {
 public:
  DisturbanceSet(Eigen::MatrixXd W, Eigen::VectorXd d_w);

  /// W = [I; -I], d_w = eps_w * 1.
  static DisturbanceSet linf_box(int n, double eps_w);

  const Eigen::MatrixXd& W() const { return W_; }
  const Eigen::VectorXd& d_w() const { return d_w_; }
  int dimension() const { return static_cast<int>(W_.cols()); }
  bool contains(const Eigen::VectorXd& w, double tol = 1e-12) const;

 private:
  Eigen::MatrixXd W_;
  Eigen::VectorXd d_w_;
};

}  // namespace ddsafe::model
