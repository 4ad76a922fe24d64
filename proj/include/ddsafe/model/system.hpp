#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>

#include "ddsafe/model/dictionary.hpp"

namespace ddsafe::model {

/// xdot = F phi(x) + G gamma(x) u.
struct GroundTruthSystem {
  std::string name;
  Eigen::MatrixXd F;
  Eigen::MatrixXd G;
  Dictionary dict;
};

/// Expresses polynomial fields f, g in the dictionary. Every dictionary entry
/// must be a unit monomial and every monomial of f, g must appear in it.
GroundTruthSystem from_polynomials(std::string name, const poly::PolyVector& f,
                                   const poly::PolyVector& g, const Dictionary& dict);

/// Flow: f = (x2, -x1 + x1^3/3 - x2), g = (0, 1); cubic dictionary, f(0) = 0.
GroundTruthSystem flow_system();

/// Twist: the three-state cubic system with g = (0, 0, 1).
GroundTruthSystem twist_system();

/// Looks up "flow" or "twist"; throws ConfigError otherwise.
GroundTruthSystem system_by_name(const std::string& name);

Eigen::VectorXd eval_system(const GroundTruthSystem& sys, std::span<const double> x, double u);

/// Stacked parameter vector (vec(F^T); vec(G^T)), row i major.
Eigen::VectorXd stacked_parameters(const GroundTruthSystem& sys);

}  // namespace ddsafe::model
