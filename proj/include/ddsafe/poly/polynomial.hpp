#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ddsafe/poly/monomial.hpp"

namespace ddsafe::poly {

/// Sparse multivariate polynomial with double coefficients.
///
/// Terms whose magnitude falls below kDropTolerance after any arithmetic are
/// removed, so `terms()` never holds (near) zero coefficients. The zero
/// polynomial has degree -1.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, double>;

  static constexpr double kDropTolerance = 1e-12;

  explicit Polynomial(int dimension = 0) : dimension_(dimension) {}

  static Polynomial constant(int n, double c);
  static Polynomial variable(int n, int i);
  static Polynomial from_monomial(const Monomial& m, double coefficient = 1.0);

  int dimension() const { return dimension_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  double coefficient(const Monomial& m) const;
  /// Accumulates `c` onto the coefficient of `m`.
  void add_term(const Monomial& m, double c);

  double evaluate(std::span<const double> x) const;
  double evaluate(const Eigen::VectorXd& x) const {
    return evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);
  Polynomial& operator*=(const Polynomial& other);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  /// Exact term-map equality (same support, same coefficients).
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dimension_ == b.dimension_ && a.terms_ == b.terms_;
  }

  /// Human readable form accepted back by parse_polynomial.
  std::string to_string(std::span<const std::string> names = {}) const;

 private:
  int dimension_;
  TermMap terms_;
};

/// Max absolute coefficient of a - b.
double max_coefficient_difference(const Polynomial& a, const Polynomial& b);

/// Ordered list of polynomials sharing one ambient dimension.
class PolyVector {
 public:
  PolyVector() = default;
  PolyVector(int dimension, std::size_t length);
  PolyVector(int dimension, std::vector<Polynomial> entries);

  int dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const Polynomial& operator[](std::size_t i) const { return entries_[i]; }
  Polynomial& operator[](std::size_t i) { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  /// Largest entry degree (-1 when every entry is zero).
  int max_degree() const;
  Eigen::VectorXd evaluate(std::span<const double> x) const;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const {
    return evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

 private:
  int dimension_ = 0;
  std::vector<Polynomial> entries_;
};

/// Formal partial derivative d p / d x_i.
Polynomial partial_derivative(const Polynomial& p, int i);

PolyVector gradient(const Polynomial& p);

/// sum_i d field_i / d x_i; the field length must equal its dimension.
Polynomial divergence(const PolyVector& field);

/// Dot product of two equal-length polynomial vectors.
Polynomial dot(const PolyVector& a, const PolyVector& b);

/// Entrywise product s * field.
PolyVector scale_field(const Polynomial& s, const PolyVector& field);

/// Coefficient vector r(x) of the robust divergence condition:
///
///   div(rho*F*phi + psi*G*gamma + rho*w) = -r(x) . (vec(F^T); vec(G^T); w).
///
/// Entry (i*|phi| + j) is -d(rho*phi_j)/dx_i, followed by n*|gamma| entries
/// -d(psi*gamma_j)/dx_i and the final n entries -d rho/dx_i.
PolyVector build_r(const Polynomial& rho, const Polynomial& psi, const PolyVector& phi,
                   const PolyVector& gamma, int n);

}  // namespace ddsafe::poly
