#include "ddsafe/poly/basis.hpp"

#include <algorithm>
#include <functional>

#include "ddsafe/error.hpp"

namespace ddsafe::poly {

std::int64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<Monomial> monomial_basis(int n, int d_min, int d_max) {
  if (n < 0 || d_min < 0 || d_min > d_max) {
    throw StructuralError("monomial_basis requires 0 <= d_min <= d_max");
  }
  std::vector<Monomial> out;
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  // Fill exponents left to right; the first variable takes the largest share
  // first, which yields graded-lex order within each degree.
  std::function<void(int, int)> fill = [&](int var, int remaining) {
    if (var == n - 1) {
      e[static_cast<std::size_t>(var)] = remaining;
      out.emplace_back(e);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[static_cast<std::size_t>(var)] = k;
      fill(var + 1, remaining - k);
    }
  };
  for (int d = d_min; d <= d_max; ++d) {
    if (n == 0) {
      if (d == 0) out.emplace_back(std::vector<int>{});
      continue;
    }
    fill(0, d);
  }
  return out;
}

}  // namespace ddsafe::poly
