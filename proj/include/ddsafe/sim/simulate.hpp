#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ddsafe/model/semialgebraic.hpp"
#include "ddsafe/model/system.hpp"
#include "ddsafe/synth/controller.hpp"

namespace ddsafe::sim {

struct SimConfig {
  double t_end = 10.0;
  double dt = 1e-3;
  /// Period after which the process noise w is redrawn.
  double hold = 0.05;
  double eps_w = 0.0;
  int trajectories = 30;
  std::uint64_t seed = 0;
  double blowup_threshold = 1e4;
  /// Trajectories leaving this box terminate; empty means [-6, 6]^n.
  model::Box bounds;

  /// Throws ConfigError unless dt > 0, hold >= dt, t_end > 0, eps_w >= 0 and
  /// trajectories >= 1.
  void validate() const;
};

enum class Termination { kHorizon, kBlowup, kLeftBox, kNonFinite };

std::string to_string(Termination t);

/// Row k holds the state at times[k] and the control, rho value and noise
/// applied from that state on (the last row repeats the values at the final
/// state).
struct Trajectory {
  int id = 0;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> controls;
  std::vector<double> rho;
  std::vector<Eigen::VectorXd> disturbances;
  Termination reason = Termination::kHorizon;
};

/// Classic RK4 with step dt; u is sampled at the step start and w is held
/// over all four stages. A null controller means open loop (u = 0). When the
/// controller is present its rho is recorded, otherwise rho is 0.
Trajectory simulate(const model::GroundTruthSystem& sys, const synth::RationalController* controller,
                    const std::vector<double>& x0, const SimConfig& cfg, int id = 0);

/// One trajectory per start, noise streams derived from (cfg.seed, index).
std::vector<Trajectory> simulate_all(const model::GroundTruthSystem& sys, const synth::RationalController* controller,
                                     const std::vector<std::vector<double>>& starts, const SimConfig& cfg,
                                     unsigned threads = 0);

struct TrajectoryAudit {
  int id = 0;
  bool started_in_x0 = false;
  bool entered_unsafe = false;
  std::optional<double> first_violation_time;
  std::optional<double> min_rho;
  Termination reason = Termination::kHorizon;
  /// Steps with |rho| <= 1e-3 where rho decreased by more than 1e-6.
  int boundary_decreases = 0;
};

struct SafetyAudit {
  std::vector<TrajectoryAudit> trajectories;
  int unsafe_count = 0;
  int blowup_count = 0;
  int left_box_count = 0;
  int non_finite_count = 0;
  int boundary_decreases = 0;
  /// Overall minimum of rho along all trajectories, when rho is supplied.
  std::optional<double> min_rho;
  /// Histogram of per-trajectory minimum rho.
  std::vector<double> histogram_edges;
  std::vector<int> histogram_counts;
};

SafetyAudit safety_audit(const std::vector<Trajectory>& trajectories, const model::SemialgebraicSet& X0,
                         const model::SemialgebraicSet& Xu, const poly::Polynomial* rho = nullptr);

/// `traj_id,t,x1..xn,u,rho,w1..wn,terminated`; terminated is 1 on the final
/// row of each trajectory.
void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajectories);
void write_audit_json(std::ostream& out, const SafetyAudit& audit);
/// `x1,x2[,x3],rho` on a tensor grid over `box`.
void write_level_set_csv(std::ostream& out, const poly::Polynomial& rho, const model::Box& box, int per_axis);

}  // namespace ddsafe::sim
