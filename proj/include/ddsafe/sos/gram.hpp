#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <vector>

#include "ddsafe/poly/monomial.hpp"
#include "ddsafe/poly/polynomial.hpp"
#include "ddsafe/sdp/conic.hpp"

namespace ddsafe::sos {

/// Gram representation p = v(x)^T Q v(x) over the full basis of degree <= d.
/// Atom a < products.size() reads the coefficient of products[a]; the last
/// atom is the trace.
struct GramLayout {
  int n = 0;
  int degree = 0;
  std::vector<poly::Monomial> basis;
  std::vector<poly::Monomial> products;
  std::map<poly::Monomial, int> atom_of;
  std::shared_ptr<const sdp::AtomSet> atoms;

  int size() const { return static_cast<int>(basis.size()); }
  int trace_atom() const { return static_cast<int>(products.size()); }
};

std::shared_ptr<const GramLayout> make_gram_layout(int n, int degree);

/// v(x)^T Q v(x) expanded.
poly::Polynomial gram_polynomial(const GramLayout& layout, const Eigen::MatrixXd& Q);

}  // namespace ddsafe::sos
