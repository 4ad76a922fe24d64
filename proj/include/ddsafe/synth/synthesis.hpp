#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddsafe/sdp/conic.hpp"
#include "ddsafe/sos/program.hpp"
#include "ddsafe/synth/dual_program.hpp"
#include "ddsafe/synth/audit.hpp"
#include "ddsafe/synth/certificate.hpp"

namespace ddsafe::synth {

enum class SynthesisStatus { kCertified, kInfeasible, kNumericalFailure, kVerificationFailed };

std::string to_string(SynthesisStatus s);

/// One solve at fixed degrees.
struct Attempt {
  Degrees degrees;
  sos::SolveStatus solve_status = sos::SolveStatus::kNumericalFailure;
  double margin = 0.0;
  double dual_bound = 0.0;
  sos::ProgramStats stats;
  int iterations = 0;
  double seconds = 0.0;
  std::string message;
};

struct SynthesisOptions {
  /// Largest d1 tried when escalating after infeasibility; below the start
  /// degree means no escalation.
  int escalate_cap = -1;
  /// Required min(c1, c2).
  double min_margin = 1e-6;
  sos::SolveOptions solve;
  AuditTolerances tolerances;
  /// Grid density of the certification audit over spec.search_box; 0 picks
  /// default_audit_per_axis(n).
  int audit_per_axis = 0;
  unsigned threads = 0;
  Provenance provenance;
};

struct SynthesisOutcome {
  SynthesisStatus status = SynthesisStatus::kNumericalFailure;
  /// Degrees of the last attempt.
  Degrees degrees;
  std::vector<Attempt> attempts;
  /// Present only when status is kCertified.
  std::optional<SafetyCertificate> certificate;
  /// Extracted but rejected certificate, for diagnostics.
  std::optional<SafetyCertificate> rejected;
  std::optional<Audit> audit;
  std::string message;
};

/// Solves the dual program, escalating (d1, d2) on certified infeasibility up to
/// the cap. A certificate is returned only when the SOS verification, the
/// coefficient checks and the grid audit all pass.
SynthesisOutcome run_synthesis(const SynthesisSpec& spec, const sdp::ConicSolver& solver,
                               const SynthesisOptions& options = {});

/// Reads every unknown of a solved program into a certificate (unverified).
SafetyCertificate extract_certificate(const DualProgram& A, const sos::SolveReport& report);

}  // namespace ddsafe::synth
