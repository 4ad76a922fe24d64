#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ddsafe/consistency/polytope.hpp"
#include "ddsafe/model/dictionary.hpp"
#include "ddsafe/model/semialgebraic.hpp"
#include "ddsafe/sdp/conic.hpp"
#include "ddsafe/sos/program.hpp"

namespace ddsafe::synth {

struct Degrees {
  int rho = 4;
  int psi = 4;
  int d1 = 4;
  int d2 = 2;
};

struct SynthesisSpec {
  consistency::ConsistencyPolytope P1;
  model::SemialgebraicSet X0;
  model::SemialgebraicSet Xu;
  model::Dictionary dict;
  Degrees degrees;
  /// Region used to check disjointness of union components.
  model::Box search_box;
};

/// Names of the five SOS memberships, in assembly order.
inline constexpr std::array<const char*, 5> kMembershipNames = {"strict-margin", "psi-upper", "psi-lower", "initial-set", "unsafe-set"};

/// An assembled instance with handles to every unknown.
struct DualProgram {
  explicit DualProgram(int n) : program(n) {}

  sos::SosProgram program;
  sos::UnknownPoly rho;
  sos::UnknownPoly psi;
  sos::SosFamily y;
  sos::SosPoly s1;
  sos::SosPoly s2;
  int c1 = -1;
  int c2 = -1;
  int t = -1;
  /// Gram blocks of the memberships and their basis degrees.
  std::array<int, 5> membership_blocks{};
  std::array<int, 5> membership_degrees{};
  /// Membership expressions (what each Gram block must reproduce).
  std::vector<sos::PolyExpr> membership_exprs;
  poly::Polynomial h;
  poly::Polynomial k;
  /// Symbolic r(x), one entry per polytope column.
  std::vector<sos::PolyExpr> r;
};

/// Builds every constraint of the dual program with the Gram degrees raised to cover each
/// expression. Throws StructuralError on degree-rule violations or an empty
/// polytope.
DualProgram assemble_dual_program(const SynthesisSpec& spec);

/// r(x) with coefficients affine in the unknown coefficients of rho and psi.
std::vector<sos::PolyExpr> symbolic_r(const sos::UnknownPoly& rho, const sos::UnknownPoly& psi,
                                      const model::Dictionary& dict);

}  // namespace ddsafe::synth
