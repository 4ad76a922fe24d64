#include "ddsafe/synth/controller.hpp"

#include <cmath>

#include "ddsafe/error.hpp"

namespace ddsafe::synth {

RationalController::RationalController(poly::Polynomial psi, poly::Polynomial rho, double blowup_threshold)
    : psi_(std::move(psi)), rho_(std::move(rho)), threshold_(blowup_threshold) {
  if (psi_.dimension() != rho_.dimension()) throw StructuralError("controller numerator and denominator dimensions differ");
  if (!(blowup_threshold > 0.0)) throw StructuralError("blowup threshold must be positive");
}

ControlValue RationalController::evaluate(std::span<const double> x) const {
  ControlValue v;
  v.psi = psi_.evaluate(x);
  v.rho = rho_.evaluate(x);
  if (v.rho == 0.0) {
    v.blowup = true;
    return v;
  }
  const double u = v.psi / v.rho;
  if (!std::isfinite(u) || std::abs(u) >= threshold_) {
    v.blowup = true;
    return v;
  }
  v.u = u;
  return v;
}

RationalController make_controller(const SafetyCertificate& cert, double blowup_threshold) {
  return RationalController(cert.psi, cert.rho, blowup_threshold);
}

}  // namespace ddsafe::synth
