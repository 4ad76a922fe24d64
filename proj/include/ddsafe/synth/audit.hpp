#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddsafe/model/semialgebraic.hpp"
#include "ddsafe/synth/dual_program.hpp"
#include "ddsafe/synth/certificate.hpp"

namespace ddsafe::synth {

struct GateResult {
  std::string name;
  bool passed = true;
  /// Worst observed value of the gate's quantity (sign convention per gate).
  double worst = 0.0;
  std::optional<std::vector<double>> witness;
  std::string detail;
};

struct Audit {
  std::vector<GateResult> gates;

  bool passed() const;
  const GateResult* first_failure() const;
  const GateResult* gate(const std::string& name) const;
};

struct AuditTolerances {
  double coefficient = 1e-6;
  double min_eigenvalue = -1e-7;
  double margin = 1e-6;
  double pointwise = 1e-6;
  double oracle = 1e-8;
  double rho_zero = 1e-4;
};

/// Coefficient-level checks of every dual-program constraint of a certificate against the reduced
/// polytope and sets in `spec`: every identity recomputed from the stored
/// polynomials and Grams, Gram eigenvalues, margins c1, c2.
Audit check_certificate(const SafetyCertificate& cert, const SynthesisSpec& spec, const AuditTolerances& tol = {});

/// Pointwise safety conditions on `points` plus the LP containment oracle
/// margin and the psi-vanishing check near rho = 0.
Audit verify_theorem_conditions(const SafetyCertificate& cert, const SynthesisSpec& spec,
                                const std::vector<std::vector<double>>& points, const AuditTolerances& tol = {},
                                unsigned threads = 0);

/// Tensor grid with `per_axis` points per coordinate, endpoints included.
std::vector<std::vector<double>> grid_points(const model::Box& box, int per_axis);

/// `count` points uniform in `box` from a seeded stream.
std::vector<std::vector<double>> uniform_points(const model::Box& box, int count, std::uint64_t seed);

/// Default grid density for the synthesis audit: 1001, 101, 21, 9 per axis
/// for n = 1, 2, 3, >= 4.
int default_audit_per_axis(int n);

/// Fills the summary record from an audit produced by verify_theorem_conditions.
AuditRecord summarize(const Audit& audit, const std::string& grid, std::size_t points);

}  // namespace ddsafe::synth
