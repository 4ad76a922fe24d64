#pragma once

#include <cstdint>
#include <vector>

#include "ddsafe/consistency/dataset.hpp"
#include "ddsafe/model/semialgebraic.hpp"
#include "ddsafe/model/system.hpp"

namespace ddsafe::sim {

/// u_s uniform in [lo, hi].
struct InputPolicy {
  double lo = -1.0;
  double hi = 1.0;
};

/// x_s uniform in `box`, y_s = f(x_s) + g(x_s) u_s + eta_s with eta_s uniform
/// on the L-infinity ball of radius epsilon. The residual bound holds exactly
/// in floating point.
consistency::Dataset generate_dataset(const model::GroundTruthSystem& sys, int T, double epsilon,
                                      const model::Box& box, const InputPolicy& policy,
                                      std::uint64_t seed);

/// max_s || y_s - f(x_s) - g(x_s) u_s ||_inf against the true system.
double max_residual(const model::GroundTruthSystem& sys, const consistency::Dataset& data);

/// M points of `set` drawn by rejection sampling in `box`. Throws ConfigError
/// when the acceptance rate falls below 1e-4.
std::vector<std::vector<double>> sample_initial_conditions(const model::SemialgebraicSet& set, int M,
                                                           std::uint64_t seed, const model::Box& box);

}  // namespace ddsafe::sim
