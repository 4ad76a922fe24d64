#include "ddsafe/model/dictionary.hpp"

#include "ddsafe/error.hpp"
#include "ddsafe/poly/basis.hpp"

namespace ddsafe::model {
namespace {

void require_distinct(const poly::PolyVector& v, const char* name) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j]) {
        throw StructuralError(std::string("duplicate entry in dictionary ") + name + " at " +
                              std::to_string(i) + " and " + std::to_string(j));
      }
    }
  }
}

poly::PolyVector monomial_vector(int n, int d_min, int d_max) {
  std::vector<poly::Polynomial> out;
  for (const auto& m : poly::monomial_basis(n, d_min, d_max)) {
    out.push_back(poly::Polynomial::from_monomial(m));
  }
  return poly::PolyVector(n, std::move(out));
}

}  // namespace

Dictionary make_dictionary(int n, poly::PolyVector phi, poly::PolyVector gamma) {
  if (phi.dimension() != n || gamma.dimension() != n) {
    throw StructuralError("dictionary dimension does not match state dimension");
  }
  if (phi.empty() || gamma.empty()) throw StructuralError("dictionaries must be nonempty");
  require_distinct(phi, "phi");
  require_distinct(gamma, "gamma");
  return Dictionary{n, std::move(phi), std::move(gamma)};
}

Dictionary default_dictionary(int n, int f_degree, bool zero_at_origin,
                              std::optional<int> g_degree) {
  if (n < 1) throw StructuralError("state dimension must be positive");
  if (f_degree < 1) throw StructuralError("f prior degree must be at least 1");
  if (g_degree && *g_degree < 0) throw StructuralError("g prior degree must be non-negative");
  return make_dictionary(n, monomial_vector(n, zero_at_origin ? 1 : 0, f_degree),
                         monomial_vector(n, 0, g_degree.value_or(0)));
}

}  // namespace ddsafe::model
