#pragma once

#include <cstddef>
#include <optional>

#include "ddsafe/poly/polynomial.hpp"

namespace ddsafe::model {

/// Monomial dictionaries: f(x) = F phi(x), g(x) = G gamma(x).
struct Dictionary {
  int n = 0;
  poly::PolyVector phi;
  poly::PolyVector gamma;

  std::size_t d_f() const { return phi.size(); }
  std::size_t d_g() const { return gamma.size(); }
  /// Number of (f, g) coordinates: n*d_f + n*d_g.
  std::size_t plant_columns() const { return static_cast<std::size_t>(n) * (d_f() + d_g()); }
};

/// Validates dimensions and rejects duplicate entries within each dictionary.
Dictionary make_dictionary(int n, poly::PolyVector phi, poly::PolyVector gamma);

/// phi = monomials of degree (zero_at_origin ? 1 : 0)..f_degree;
/// gamma = (1) when g_degree is empty, else monomials of degree 0..*g_degree.
Dictionary default_dictionary(int n, int f_degree, bool zero_at_origin,
                              std::optional<int> g_degree = std::nullopt);

}  // namespace ddsafe::model
