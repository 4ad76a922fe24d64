#include "ddsafe/poly/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "ddsafe/error.hpp"
#include "ddsafe/format.hpp"

namespace ddsafe::poly {
namespace {

void require_same_dimension(int a, int b) {
  if (a != b) {
    throw StructuralError("polynomial dimension mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
  }
}

void drop_small(Polynomial::TermMap& terms) {
  std::erase_if(terms, [](const auto& kv) {
    return std::abs(kv.second) < Polynomial::kDropTolerance;
  });
}

}  // namespace

Polynomial Polynomial::constant(int n, double c) {
  Polynomial p(n);
  p.add_term(Monomial::one(n), c);
  return p;
}

Polynomial Polynomial::variable(int n, int i) {
  Polynomial p(n);
  p.add_term(Monomial::variable(n, i), 1.0);
  return p;
}

Polynomial Polynomial::from_monomial(const Monomial& m, double coefficient) {
  Polynomial p(m.dimension());
  p.add_term(m, coefficient);
  return p;
}

int Polynomial::degree() const {
  // The map is graded, so the last key has the largest degree.
  return terms_.empty() ? -1 : terms_.rbegin()->first.degree();
}

double Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  require_same_dimension(dimension_, m.dimension());
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kDropTolerance) terms_.erase(it);
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension_) {
    throw StructuralError("evaluation point has wrong dimension");
  }
  const int deg = std::max(degree(), 0);
  // powers[i][k] = x_i^k
  std::vector<std::vector<double>> powers(x.size(), std::vector<double>(deg + 1, 1.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (int k = 1; k <= deg; ++k) powers[i][k] = powers[i][k - 1] * x[i];
  }
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double v = c;
    for (std::size_t i = 0; i < x.size(); ++i) v *= powers[i][m.exponent(static_cast<int>(i))];
    sum += v;
  }
  return sum;
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& kv : out.terms_) kv.second = -kv.second;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same_dimension(dimension_, other.dimension_);
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_same_dimension(dimension_, other.dimension_);
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  for (auto& kv : terms_) kv.second *= s;
  drop_small(terms_);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  require_same_dimension(a.dimension_, b.dimension_);
  Polynomial out(a.dimension_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) out.terms_[ma * mb] += ca * cb;
  }
  drop_small(out.terms_);
  return out;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  *this = *this * other;
  return *this;
}

std::string Polynomial::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::string out;
  // Highest degree first reads naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    const bool negative = std::signbit(c);
    const double mag = std::abs(c);
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    if (m.degree() == 0) {
      out += format_double(mag);
    } else if (mag == 1.0) {
      out += m.to_string(names);
    } else {
      out += format_double(mag) + "*" + m.to_string(names);
    }
  }
  return out;
}

double max_coefficient_difference(const Polynomial& a, const Polynomial& b) {
  double worst = 0.0;
  for (const auto& [m, c] : a.terms()) worst = std::max(worst, std::abs(c - b.coefficient(m)));
  for (const auto& [m, c] : b.terms()) {
    if (a.terms().find(m) == a.terms().end()) worst = std::max(worst, std::abs(c));
  }
  return worst;
}

PolyVector::PolyVector(int dimension, std::size_t length)
    : dimension_(dimension), entries_(length, Polynomial(dimension)) {}

PolyVector::PolyVector(int dimension, std::vector<Polynomial> entries)
    : dimension_(dimension), entries_(std::move(entries)) {
  for (const auto& p : entries_) require_same_dimension(dimension_, p.dimension());
}

int PolyVector::max_degree() const {
  int d = -1;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

Eigen::VectorXd PolyVector::evaluate(std::span<const double> x) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(entries_.size()));
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = entries_[i].evaluate(x);
  }
  return out;
}

Polynomial partial_derivative(const Polynomial& p, int i) {
  if (i < 0 || i >= p.dimension()) {
    throw StructuralError("partial derivative index " + std::to_string(i) + " out of range");
  }
  Polynomial out(p.dimension());
  for (const auto& [m, c] : p.terms()) {
    const int e = m.exponent(i);
    if (e > 0) out.add_term(m.lowered(i), c * e);
  }
  return out;
}

PolyVector gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  g.reserve(static_cast<std::size_t>(p.dimension()));
  for (int i = 0; i < p.dimension(); ++i) g.push_back(partial_derivative(p, i));
  return PolyVector(p.dimension(), std::move(g));
}

Polynomial divergence(const PolyVector& field) {
  if (static_cast<int>(field.size()) != field.dimension()) {
    throw StructuralError("divergence needs a field of length equal to its dimension");
  }
  Polynomial out(field.dimension());
  for (int i = 0; i < field.dimension(); ++i) {
    out += partial_derivative(field[static_cast<std::size_t>(i)], i);
  }
  return out;
}

Polynomial dot(const PolyVector& a, const PolyVector& b) {
  if (a.size() != b.size()) throw StructuralError("dot of vectors with different lengths");
  Polynomial out(a.dimension());
  for (std::size_t i = 0; i < a.size(); ++i) out += a[i] * b[i];
  return out;
}

PolyVector scale_field(const Polynomial& s, const PolyVector& field) {
  std::vector<Polynomial> out;
  out.reserve(field.size());
  for (const auto& p : field) out.push_back(s * p);
  return PolyVector(field.dimension(), std::move(out));
}

PolyVector build_r(const Polynomial& rho, const Polynomial& psi, const PolyVector& phi,
                   const PolyVector& gamma, int n) {
  if (phi.empty() || gamma.empty()) throw StructuralError("build_r needs nonempty dictionaries");
  for (int d : {rho.dimension(), psi.dimension(), phi.dimension(), gamma.dimension()}) {
    require_same_dimension(d, n);
  }
  std::vector<Polynomial> r;
  r.reserve(static_cast<std::size_t>(n) * (phi.size() + gamma.size() + 1));
  std::vector<Polynomial> rho_phi, psi_gamma;
  for (const auto& p : phi) rho_phi.push_back(rho * p);
  for (const auto& g : gamma) psi_gamma.push_back(psi * g);
  for (int i = 0; i < n; ++i) {
    for (const auto& q : rho_phi) r.push_back(-partial_derivative(q, i));
  }
  for (int i = 0; i < n; ++i) {
    for (const auto& q : psi_gamma) r.push_back(-partial_derivative(q, i));
  }
  for (int i = 0; i < n; ++i) r.push_back(-partial_derivative(rho, i));
  return PolyVector(n, std::move(r));
}

}  // namespace ddsafe::poly
