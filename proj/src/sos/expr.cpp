#include "ddsafe/sos/expr.hpp"

#include "ddsafe/error.hpp"

namespace ddsafe::sos {

AffineForm& AffineForm::operator+=(const AffineForm& o) {
  constant += o.constant;
  for (const auto& [v, c] : o.terms) {
    auto& slot = terms[v];
    slot += c;
    if (slot == 0.0) terms.erase(v);
  }
  return *this;
}

AffineForm& AffineForm::operator*=(double s) {
  if (s == 0.0) {
    terms.clear();
    constant = 0.0;
    return *this;
  }
  constant *= s;
  for (auto& [v, c] : terms) c *= s;
  return *this;
}

PolyExpr::PolyExpr(const poly::Polynomial& p) : n_(p.dimension()) {
  for (const auto& [m, c] : p.terms()) coeffs_[m].constant = c;
}

PolyExpr PolyExpr::constant(int n, double c) {
  PolyExpr e(n);
  e.add_constant(poly::Monomial::one(n), c);
  return e;
}

PolyExpr PolyExpr::variable(int n, VarRef v, const poly::Monomial& m, double coef) {
  PolyExpr e(n);
  e.add(m, v, coef);
  return e;
}

int PolyExpr::degree() const {
  int d = -1;
  for (const auto& [m, f] : coeffs_) d = std::max(d, m.degree());
  return d;
}

void PolyExpr::prune(const poly::Monomial& m) {
  auto it = coeffs_.find(m);
  if (it != coeffs_.end() && it->second.is_zero()) coeffs_.erase(it);
}

void PolyExpr::add(const poly::Monomial& m, VarRef v, double coef) {
  if (m.dimension() != n_) throw StructuralError("monomial dimension differs from expression dimension");
  if (coef == 0.0) return;
  AffineForm f;
  f.terms[v] = coef;
  coeffs_[m] += f;
  prune(m);
}

void PolyExpr::add_constant(const poly::Monomial& m, double c) {
  if (m.dimension() != n_) throw StructuralError("monomial dimension differs from expression dimension");
  if (c == 0.0) return;
  coeffs_[m].constant += c;
  prune(m);
}

void PolyExpr::add_combo(int family, const Eigen::VectorXd& weights) {
  for (auto& c : combos_)
    if (c.family == family) {
      if (c.weights.size() != weights.size()) throw StructuralError("family combo length mismatch");
      c.weights += weights;
      return;
    }
  combos_.push_back({family, weights});
}

PolyExpr PolyExpr::operator-() const {
  PolyExpr e = *this;
  e *= -1.0;
  return e;
}

PolyExpr& PolyExpr::operator+=(const PolyExpr& o) {
  if (n_ == 0) n_ = o.n_;
  if (o.n_ != 0 && o.n_ != n_) throw StructuralError("expression dimension mismatch");
  for (const auto& [m, f] : o.coeffs_) {
    coeffs_[m] += f;
    prune(m);
  }
  for (const auto& c : o.combos_) add_combo(c.family, c.weights);
  return *this;
}

PolyExpr& PolyExpr::operator-=(const PolyExpr& o) { return *this += -o; }

PolyExpr& PolyExpr::operator*=(double s) {
  if (s == 0.0) {
    coeffs_.clear();
    combos_.clear();
    return *this;
  }
  for (auto& [m, f] : coeffs_) f *= s;
  for (auto& c : combos_) c.weights *= s;
  return *this;
}

PolyExpr& PolyExpr::operator*=(const poly::Polynomial& p) {
  if (!combos_.empty()) throw StructuralError("family combinations cannot be multiplied by a polynomial");
  if (p.dimension() != n_) throw StructuralError("expression dimension mismatch");
  std::map<poly::Monomial, AffineForm> out;
  for (const auto& [m, f] : coeffs_)
    for (const auto& [mp, c] : p.terms()) {
      AffineForm g = f;
      g *= c;
      out[m * mp] += g;
    }
  coeffs_.clear();
  for (auto& [m, f] : out)
    if (!f.is_zero()) coeffs_.emplace(m, std::move(f));
  return *this;
}

}  // namespace ddsafe::sos
