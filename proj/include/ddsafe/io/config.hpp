#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddsafe/model/dictionary.hpp"
#include "ddsafe/model/semialgebraic.hpp"
#include "ddsafe/model/system.hpp"
#include "ddsafe/sim/data.hpp"
#include "ddsafe/sim/simulate.hpp"
#include "ddsafe/synth/dual_program.hpp"

namespace ddsafe::io {

inline constexpr int kConfigSchema = 1;

struct SetConfig {
  model::SetMode mode = model::SetMode::kIntersection;
  std::vector<std::string> text;
  std::vector<poly::Polynomial> polys;

  model::SemialgebraicSet make(int n) const { return model::SemialgebraicSet(n, polys, mode); }
};

struct DataConfig {
  int samples = 0;
  double epsilon = 0.0;
  model::Box box;
  sim::InputPolicy input;
  std::uint64_t seed = 0;
};

struct SynthConfig {
  synth::Degrees degrees;
  model::Box search_box;
  int escalate_cap = -1;
  double min_margin = 1e-6;
  int audit_per_axis = 0;
};

struct SimSection {
  sim::SimConfig sim;
  /// Rejection-sampling box for initial conditions.
  model::Box init_box;
  int level_set_per_axis = 101;
};

/// Published figures for this scenario, printed next to computed ones.
struct ReferenceFigures {
  std::optional<int> columns;
  std::optional<int> faces;
  std::optional<int> nonredundant;
  std::optional<int> gram_blocks;
  std::optional<int> max_gram;
  std::optional<int> dim_f;
};

struct ProblemConfig {
  std::string name;
  int n = 0;
  model::GroundTruthSystem system;
  /// Prior dictionary used to build the consistency polytope.
  model::Dictionary prior;
  DataConfig data;
  double eps_w = 0.0;
  SetConfig initial;
  SetConfig unsafe;
  SynthConfig synth;
  SimSection simulation;
  ReferenceFigures reference;
};

/// Parses schema-1 YAML. Throws ConfigError naming the field and line.
ProblemConfig parse_config(const std::string& text, const std::string& source = "<config>");
ProblemConfig load_config(const std::string& path);

}  // namespace ddsafe::io
