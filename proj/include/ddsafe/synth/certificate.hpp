#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddsafe/poly/polynomial.hpp"
#include "ddsafe/synth/dual_program.hpp"

namespace ddsafe::synth {

/// Gram matrix over the full monomial basis of degree <= `degree`.
struct GramCertificate {
  int degree = 0;
  Eigen::MatrixXd Q;
};

struct SolverStats {
  std::string solver;
  std::string status;
  int iterations = 0;
  double objective = 0.0;
  double dual_bound = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;
  int psd_blocks = 0;
  int max_block_size = 0;
  int equalities = 0;
};

struct Provenance {
  std::string config_sha256;
  std::string data_sha256;
  std::uint64_t seed = 0;
  std::string tool_version;
};

/// Worst values seen by the grid audit at certification time.
struct AuditRecord {
  std::string grid;
  std::size_t points = 0;
  double worst_margin = 0.0;
  double worst_psi_bound = 0.0;
  double min_rho_x0 = 0.0;
  double max_rho_xu = 0.0;
  double min_oracle_margin = 0.0;
};

struct SafetyCertificate {
  int n = 0;
  Degrees degrees;
  poly::Polynomial rho;
  poly::Polynomial psi;
  /// One SOS multiplier per face of the reduced polytope.
  std::vector<poly::Polynomial> y;
  poly::Polynomial s1;
  poly::Polynomial s2;
  double c1 = 0.0;
  double c2 = 0.0;
  /// Single-polynomial descriptions of the unsafe and initial sets.
  poly::Polynomial h;
  poly::Polynomial k;
  std::vector<GramCertificate> y_grams;
  GramCertificate s1_gram;
  GramCertificate s2_gram;
  /// Grams of the five memberships, in kMembershipNames order.
  std::array<GramCertificate, 5> membership_grams;
  SolverStats solver;
  bool sos_verified = false;
  double sos_max_residual = 0.0;
  double sos_min_eigenvalue = 0.0;
  AuditRecord audit;
  Provenance provenance;
};

inline constexpr int kCertificateSchema = 1;

void write_certificate_json(std::ostream& out, const SafetyCertificate& cert);
void save_certificate_json(const std::string& path, const SafetyCertificate& cert);
/// Throws ConfigError on malformed input.
SafetyCertificate read_certificate_json(std::istream& in);
SafetyCertificate load_certificate_json(const std::string& path);

}  // namespace ddsafe::synth
