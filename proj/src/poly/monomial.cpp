#include "ddsafe/poly/monomial.hpp"

#include <numeric>
#include <stdexcept>

#include "ddsafe/error.hpp"

namespace ddsafe::poly {

Monomial::Monomial(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw StructuralError("monomial exponents must be non-negative");
  }
  degree_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

Monomial Monomial::one(int n) { return Monomial(std::vector<int>(static_cast<std::size_t>(n), 0)); }

Monomial Monomial::variable(int n, int i, int power) {
  if (i < 0 || i >= n) throw StructuralError("variable index out of range");
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(i)] = power;
  return Monomial(std::move(e));
}

double Monomial::evaluate(std::span<const double> x) const {
  double v = 1.0;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    for (int k = 0; k < exponents_[i]; ++k) v *= x[i];
  }
  return v;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.dimension() != dimension()) {
    throw StructuralError("monomial dimension mismatch");
  }
  Monomial out = *this;
  for (std::size_t i = 0; i < exponents_.size(); ++i) out.exponents_[i] += other.exponents_[i];
  out.degree_ += other.degree_;
  return out;
}

Monomial Monomial::lowered(int i) const {
  Monomial out = *this;
  out.exponents_[static_cast<std::size_t>(i)] -= 1;
  out.degree_ -= 1;
  return out;
}

std::string Monomial::to_string(std::span<const std::string> names) const {
  std::string out;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (exponents_[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += i < names.size() ? names[i] : "x" + std::to_string(i + 1);
    if (exponents_[i] > 1) out += "^" + std::to_string(exponents_[i]);
  }
  return out.empty() ? "1" : out;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
  // Same degree: the larger exponent tuple comes first.
  const std::size_t n = std::min(a.exponents_.size(), b.exponents_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a.exponents_[i] != b.exponents_[i]) {
      return b.exponents_[i] <=> a.exponents_[i];
    }
  }
  return a.exponents_.size() <=> b.exponents_.size();
}

std::vector<std::string> default_variable_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  return names;
}

}  // namespace ddsafe::poly
