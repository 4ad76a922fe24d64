#pragma once

#include <span>

#include "ddsafe/poly/polynomial.hpp"
#include "ddsafe/synth/certificate.hpp"

namespace ddsafe::synth {

struct ControlValue {
  /// Set when rho vanishes or |psi / rho| reaches the threshold; u is then 0.
  bool blowup = false;
  double u = 0.0;
  double psi = 0.0;
  double rho = 0.0;
};

/// u(x) = psi(x) / rho(x) with a blowup guard.
class RationalController {
 public:
  RationalController(poly::Polynomial psi, poly::Polynomial rho, double blowup_threshold = 1e4);

  ControlValue evaluate(std::span<const double> x) const;

  const poly::Polynomial& psi() const { return psi_; }
  const poly::Polynomial& rho() const { return rho_; }
  double blowup_threshold() const { return threshold_; }

 private:
  poly::Polynomial psi_;
  poly::Polynomial rho_;
  double threshold_;
};

RationalController make_controller(const SafetyCertificate& cert, double blowup_threshold = 1e4);

}  // namespace ddsafe::synth
