#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "ddsafe/consistency/polytope.hpp"
#include "ddsafe/io/config.hpp"
#include "ddsafe/synth/dual_program.hpp"

namespace ddsafe::cli {

inline constexpr const char* kToolVersion = "ddsafe 0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kInfeasible = 3, kVerification = 4 };

struct Options {
  std::string config;
  std::string dataset;
  std::string certificate;
  std::string out;
  bool open_loop = false;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps_w_override;
  std::optional<int> escalate_cap;
  unsigned threads = 0;
};

/// Everything synthesis and verification need, rebuilt from files.
struct Problem {
  io::ProblemConfig config;
  consistency::Dataset data;
  double eps_w = 0.0;
  consistency::ConsistencyPolytope full;
  consistency::FaceReduction reduction;
  synth::SynthesisSpec spec;
};

Problem build_problem(const io::ProblemConfig& config, const consistency::Dataset& data, double eps_w);

/// Each command reports to `log` and returns an ExitCode; exceptions
/// propagate (see run()).
int cmd_gen(const Options& opt, std::ostream& log);
int cmd_synth(const Options& opt, std::ostream& log);
int cmd_simulate(const Options& opt, std::ostream& log);
int cmd_verify(const Options& opt, std::ostream& log);
int cmd_report(const Options& opt, std::ostream& log);

/// Dispatches by name and maps exceptions to exit codes: configuration,
/// parse, structural and data errors to 1, numerical errors to 2.
int run(const std::string& command, const Options& opt, std::ostream& log, std::ostream& err);

}  // namespace ddsafe::cli
