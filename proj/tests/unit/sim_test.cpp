#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ddsafe/error.hpp"
#include "ddsafe/sim/data.hpp"
#include "ddsafe/sim/simulate.hpp"
#include "scenarios.hpp"

using namespace ddsafe;
using namespace ddsafe::sim;
using ddsafe::testing::parse;

namespace {

/// xdot = a x with phi = (x), gamma = (1), G = 0.
model::GroundTruthSystem scalar_linear(double a) {
  model::GroundTruthSystem s;
  s.name = "linear";
  s.dict = model::make_dictionary(1, poly::PolyVector(1, {parse("x1", 1)}), poly::PolyVector(1, {parse("1", 1)}));
  s.F = Eigen::MatrixXd::Constant(1, 1, a);
  s.G = Eigen::MatrixXd::Zero(1, 1);
  return s;
}

double endpoint_error(double dt) {
  SimConfig cfg;
  cfg.dt = dt;
  cfg.hold = dt;
  cfg.t_end = 1.0;
  const auto tr = simulate(scalar_linear(-1.0), nullptr, {1.0}, cfg);
  return std::abs(tr.states.back()(0) - std::exp(-1.0));
}

model::SemialgebraicSet flow_x0() {
  return model::SemialgebraicSet(2, {parse("0.25 - x1^2 - (x2+3)^2", 2)}, model::SetMode::kIntersection);
}

model::SemialgebraicSet flow_xu() {
  return model::SemialgebraicSet(2, {parse("0.16 - (x1+1)^2 - (x2+1)^2", 2), parse("0.16 - (x1+1)^2 - (x2-1)^2", 2)},
                                 model::SetMode::kUnionProduct);
}

}  // namespace

TEST(GenerateDataset, ZeroNoiseGivesExactDerivatives) {
  const auto sys = model::flow_system();
  const auto data = generate_dataset(sys, 25, 0.0, model::Box::cube(2, -1, 1), {}, 4);
  ASSERT_EQ(data.size(), 25u);
  for (const auto& s : data.samples) {
    const Eigen::VectorXd f = model::eval_system(sys, std::span<const double>(s.x.data(), 2), s.u);
    EXPECT_TRUE(f == s.y);
  }
  EXPECT_EQ(max_residual(sys, data), 0.0);
}

TEST(GenerateDataset, ResidualBoundHoldsAndSeedsAreDeterministic) {
  for (const double eps : {0.5, 1.0, 2.0}) {
    const auto a = generate_dataset(model::twist_system(), 80, eps, model::Box::cube(3, -1, 1), {}, 9);
    EXPECT_LE(max_residual(model::twist_system(), a), eps);
    const auto b = generate_dataset(model::twist_system(), 80, eps, model::Box::cube(3, -1, 1), {}, 9);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a.samples[i].y == b.samples[i].y);
  }
}

TEST(SampleInitialConditions, PointsLieInSet) {
  const auto X0 = flow_x0();
  const auto pts = sample_initial_conditions(X0, 30, 1, model::Box{{-1, -4}, {1, -2}});
  ASSERT_EQ(pts.size(), 30u);
  for (const auto& p : pts) EXPECT_TRUE(model::set_contains(X0, p));
  const model::SemialgebraicSet everything(2, {}, model::SetMode::kIntersection);
  EXPECT_EQ(sample_initial_conditions(everything, 1, 1, model::Box::cube(2, -1, 1)).size(), 1u);
  const model::SemialgebraicSet point(2, {parse("-x1^2 - x2^2", 2)}, model::SetMode::kIntersection);
  EXPECT_THROW(sample_initial_conditions(point, 5, 1, model::Box::cube(2, -1, 1)), ConfigError);
}

TEST(Simulate, ExponentialDecayMatchesClosedForm) {
  SimConfig cfg;
  cfg.t_end = 1.0;
  const auto tr = simulate(scalar_linear(-1.0), nullptr, {1.0}, cfg);
  EXPECT_EQ(tr.reason, Termination::kHorizon);
  EXPECT_EQ(tr.states.size(), 1001u);
  EXPECT_NEAR(tr.times.back(), 1.0, 1e-12);
  EXPECT_NEAR(tr.states.back()(0), 0.367879441171, 1e-6);
}

TEST(Simulate, Rk4OrderRatio) {
  const double ratio = endpoint_error(0.1) / endpoint_error(0.05);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(Simulate, ZeroControllerMatchesOpenLoop) {
  const synth::RationalController zero(parse("0", 2), parse("1", 2));
  SimConfig cfg;
  cfg.t_end = 2.0;
  const auto open = simulate(model::flow_system(), nullptr, {0.1, -3.0}, cfg);
  const auto closed = simulate(model::flow_system(), &zero, {0.1, -3.0}, cfg);
  ASSERT_EQ(open.states.size(), closed.states.size());
  for (std::size_t k = 0; k < open.states.size(); ++k) ASSERT_TRUE(open.states[k] == closed.states[k]);
}

TEST(Simulate, SeededNoiseIsDeterministicHeldAndLegal) {
  SimConfig cfg;
  cfg.t_end = 1.0;
  cfg.eps_w = 2.0;
  cfg.seed = 17;
  const auto a = simulate(model::flow_system(), nullptr, {0.0, -3.0}, cfg, 4);
  const auto b = simulate(model::flow_system(), nullptr, {0.0, -3.0}, cfg, 4);
  const auto c = simulate(model::flow_system(), nullptr, {0.0, -3.0}, cfg, 5);
  ASSERT_EQ(a.states.size(), b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    ASSERT_TRUE(a.states[k] == b.states[k]);
    ASSERT_TRUE(a.disturbances[k] == b.disturbances[k]);
    EXPECT_LE(a.disturbances[k].lpNorm<Eigen::Infinity>(), cfg.eps_w);
    if (k % 50 != 0) {
      EXPECT_TRUE(a.disturbances[k] == a.disturbances[k - 1]) << k;
    }
  }
  EXPECT_FALSE(a.states.back() == c.states.back());
}

TEST(Simulate, TerminationReasons) {
  SimConfig cfg;
  cfg.t_end = 5.0;
  const auto grow = simulate(scalar_linear(1.0), nullptr, {1.0}, cfg);
  EXPECT_EQ(grow.reason, Termination::kLeftBox);
  EXPECT_NEAR(grow.times.back(), std::log(6.0), 2e-3);

  // u = 1 / (x - 0.5) blows up as x decays through 0.5.
  const synth::RationalController ctl(parse("1", 1), parse("x1 - 0.5", 1));
  const auto blow = simulate(scalar_linear(-1.0), &ctl, {1.0}, cfg);
  EXPECT_EQ(blow.reason, Termination::kBlowup);
  EXPECT_LT(blow.times.back(), 1.0);

  SimConfig bad = cfg;
  bad.trajectories = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = cfg;
  bad.hold = 1e-4;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Simulate, FlowOpenLoopEntersUnsafeSet) {
  const auto X0 = flow_x0();
  const auto Xu = flow_xu();
  const auto starts = sample_initial_conditions(X0, 30, 1, model::Box{{-1, -4}, {1, -2}});
  SimConfig cfg;
  const auto trs = simulate_all(model::flow_system(), nullptr, starts, cfg);
  const auto audit = safety_audit(trs, X0, Xu);
  EXPECT_GE(audit.unsafe_count, 1);
  for (const auto& t : audit.trajectories) {
    EXPECT_TRUE(t.started_in_x0);
    if (t.entered_unsafe) {
      ASSERT_TRUE(t.first_violation_time.has_value());
      EXPECT_GT(*t.first_violation_time, 0.0);
    }
  }
}

TEST(SafetyAudit, RhoStatisticsAndExports) {
  const auto rho = parse("x1", 1);
  const synth::RationalController ctl(parse("0", 1), rho);
  SimConfig cfg;
  cfg.t_end = 0.5;
  const auto trs = simulate_all(scalar_linear(-1.0), &ctl, {{1.0}, {2.0}}, cfg);
  const model::SemialgebraicSet X0(1, {parse("4 - x1^2", 1)}, model::SetMode::kIntersection);
  const model::SemialgebraicSet Xu(1, {parse("-1 - x1^2", 1)}, model::SetMode::kIntersection);
  const auto audit = safety_audit(trs, X0, Xu, &rho);
  EXPECT_EQ(audit.unsafe_count, 0);
  ASSERT_TRUE(audit.min_rho.has_value());
  EXPECT_NEAR(*audit.min_rho, std::exp(-0.5), 1e-6);
  int total = 0;
  for (int c : audit.histogram_counts) total += c;
  EXPECT_EQ(total, 2);

  std::ostringstream csv;
  write_trajectories_csv(csv, trs);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "traj_id,t,x1,u,rho,w1,terminated");
  std::ostringstream grid;
  write_level_set_csv(grid, parse("x1*x2", 2), model::Box::cube(2, -1, 1), 3);
  EXPECT_EQ(grid.str(), "x1,x2,rho\n-1,-1,1\n-1,0,0\n-1,1,-1\n0,-1,0\n0,0,0\n0,1,0\n1,-1,-1\n1,0,0\n1,1,1\n");
  std::ostringstream js;
  write_audit_json(js, audit);
  EXPECT_NE(js.str().find("\"unsafe_count\": 0"), std::string::npos);
}
