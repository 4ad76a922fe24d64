#include "ddsafe/sos/gram.hpp"

#include "ddsafe/error.hpp"
#include "ddsafe/poly/basis.hpp"

namespace ddsafe::sos {

std::shared_ptr<const GramLayout> make_gram_layout(int n, int degree) {
  if (n < 1 || degree < 0) throw StructuralError("Gram layout needs n >= 1 and degree >= 0");
  auto layout = std::make_shared<GramLayout>();
  layout->n = n;
  layout->degree = degree;
  layout->basis = poly::monomial_basis(n, 0, degree);
  layout->products = poly::monomial_basis(n, 0, 2 * degree);
  for (std::size_t a = 0; a < layout->products.size(); ++a)
    layout->atom_of.emplace(layout->products[a], static_cast<int>(a));
  auto atoms = std::make_shared<sdp::AtomSet>(layout->products.size() + 1);
  const int s = layout->size();
  for (int p = 0; p < s; ++p)
    for (int q = 0; q < s; ++q) {
      const int a = layout->atom_of.at(layout->basis[static_cast<std::size_t>(p)] * layout->basis[static_cast<std::size_t>(q)]);
      (*atoms)[static_cast<std::size_t>(a)].push_back({p, q, 1.0});
    }
  auto& trace = atoms->back();
  for (int p = 0; p < s; ++p) trace.push_back({p, p, 1.0});
  layout->atoms = std::move(atoms);
  return layout;
}

poly::Polynomial gram_polynomial(const GramLayout& layout, const Eigen::MatrixXd& Q) {
  const int s = layout.size();
  if (Q.rows() != s || Q.cols() != s) throw StructuralError("Gram matrix size differs from basis size");
  std::vector<double> coef(layout.products.size(), 0.0);
  for (std::size_t a = 0; a < layout.products.size(); ++a)
    for (const auto& e : (*layout.atoms)[a]) coef[a] += e.w * Q(e.p, e.q);
  poly::Polynomial p(layout.n);
  for (std::size_t a = 0; a < coef.size(); ++a)
    if (coef[a] != 0.0) p.add_term(layout.products[a], coef[a]);
  return p;
}

}  // namespace ddsafe::sos
