#pragma once

#include <Eigen/Dense>

#include <compare>
#include <map>
#include <vector>

#include "ddsafe/poly/monomial.hpp"
#include "ddsafe/poly/polynomial.hpp"

namespace ddsafe::sos {

/// A scalar decision variable: a declared scalar, or one Gram atom of a
/// (non-family) PSD block.
struct VarRef {
  enum Kind : int { kScalar = 0, kAtom = 1 };
  int kind = kScalar;
  int index = 0;
  int atom = 0;

  static VarRef scalar(int handle) { return {kScalar, handle, 0}; }
  static VarRef gram_atom(int block, int atom) { return {kAtom, block, atom}; }
  friend auto operator<=>(const VarRef&, const VarRef&) = default;
};

struct AffineForm {
  std::map<VarRef, double> terms;
  double constant = 0.0;

  bool is_zero() const { return constant == 0.0 && terms.empty(); }
  AffineForm& operator+=(const AffineForm& o);
  AffineForm& operator*=(double s);
};

/// sum_i weights(i) * y_i for the members of an SOS family.
struct FamilyCombo {
  int family = 0;
  Eigen::VectorXd weights;
};

/// Polynomial in x whose coefficients are affine in the decision variables,
/// plus linear combinations of SOS family members.
class PolyExpr {
 public:
  explicit PolyExpr(int n = 0) : n_(n) {}
  explicit PolyExpr(const poly::Polynomial& p);

  static PolyExpr constant(int n, double c);
  static PolyExpr variable(int n, VarRef v, const poly::Monomial& m, double coef = 1.0);

  int dimension() const { return n_; }
  /// Highest degree among nonzero coefficients, ignoring family combos; -1
  /// for zero.
  int degree() const;
  const std::map<poly::Monomial, AffineForm>& coefficients() const { return coeffs_; }
  const std::vector<FamilyCombo>& combos() const { return combos_; }

  void add(const poly::Monomial& m, VarRef v, double coef);
  void add_constant(const poly::Monomial& m, double c);
  void add_combo(int family, const Eigen::VectorXd& weights);

  PolyExpr operator-() const;
  PolyExpr& operator+=(const PolyExpr& o);
  PolyExpr& operator-=(const PolyExpr& o);
  PolyExpr& operator*=(double s);
  /// Throws StructuralError when family combos are present.
  PolyExpr& operator*=(const poly::Polynomial& p);

  friend PolyExpr operator+(PolyExpr a, const PolyExpr& b) { return a += b; }
  friend PolyExpr operator-(PolyExpr a, const PolyExpr& b) { return a -= b; }
  friend PolyExpr operator*(PolyExpr a, double s) { return a *= s; }
  friend PolyExpr operator*(double s, PolyExpr a) { return a *= s; }
  friend PolyExpr operator*(PolyExpr a, const poly::Polynomial& p) { return a *= p; }
  friend PolyExpr operator*(const poly::Polynomial& p, PolyExpr a) { return a *= p; }

 private:
  void prune(const poly::Monomial& m);

  int n_;
  std::map<poly::Monomial, AffineForm> coeffs_;
  std::vector<FamilyCombo> combos_;
};

}  // namespace ddsafe::sos
