#include "ddsafe/synth/complexity.hpp"

#include "ddsafe/error.hpp"
#include "ddsafe/poly/basis.hpp"

namespace ddsafe::synth {

ComplexityReport complexity_report(int n, std::size_t plant_coordinates, int d_r, int faces) {
  if (n < 1 || d_r < 0 || faces < 0) throw StructuralError("complexity report needs n >= 1, d_r >= 0, faces >= 0");
  ComplexityReport r;
  r.n = n;
  r.d_p = static_cast<int>(plant_coordinates) + 2 * n;
  r.d_r = d_r;
  r.naive_max_gram = poly::binomial(r.d_p + d_r, d_r);
  r.dual_max_gram = poly::binomial(n + d_r, d_r);
  r.dual_blocks = faces > 0 ? faces + 7 : 0;
  return r;
}

ComplexityReport complexity_report(const SynthesisSpec& spec) {
  return complexity_report(spec.dict.n, spec.dict.plant_columns(), spec.degrees.d1, static_cast<int>(spec.P1.rows()));
}

std::string describe(const ComplexityReport& r) {
  return "C(" + std::to_string(r.d_p + r.d_r) + "," + std::to_string(r.d_r) + ") = " + std::to_string(r.naive_max_gram) +
         " -> C(" + std::to_string(r.n + r.d_r) + "," + std::to_string(r.d_r) + ") = " + std::to_string(r.dual_max_gram);
}

}  // namespace ddsafe::synth
