#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "ddsafe/synth/dual_program.hpp"

namespace ddsafe::synth {

/// Largest Gram matrix of a direct Positivstellensatz relaxation in
/// (x, f, g, w) against the dual formulation in x alone.
struct ComplexityReport {
  int n = 0;
  /// Dimension count of the direct approach: plant coordinates plus 2n.
  int d_p = 0;
  int d_r = 0;
  std::int64_t naive_max_gram = 0;
  std::int64_t dual_max_gram = 0;
  /// Gram blocks of the dual program (one per face plus s1, s2 and the five memberships);
  /// zero when the face count is unknown.
  int dual_blocks = 0;
};

/// `plant_coordinates` counts the unknown coefficients of f and g together.
ComplexityReport complexity_report(int n, std::size_t plant_coordinates, int d_r, int faces = 0);
ComplexityReport complexity_report(const SynthesisSpec& spec);

/// "C(28,4) = 20475 -> C(6,4) = 15" style line.
std::string describe(const ComplexityReport& report);

}  // namespace ddsafe::synth
