#pragma once

#include <cstdint>
#include <vector>

#include "ddsafe/poly/monomial.hpp"

namespace ddsafe::poly {

/// Binomial coefficient C(n, k); zero when k < 0 or k > n.
std::int64_t binomial(int n, int k);

/// All monomials in `n` variables with d_min <= degree <= d_max, in graded
/// lexicographic order. Size is C(n+d_max, d_max) - C(n+d_min-1, d_min-1).
std::vector<Monomial> monomial_basis(int n, int d_min, int d_max);

}  // namespace ddsafe::poly
