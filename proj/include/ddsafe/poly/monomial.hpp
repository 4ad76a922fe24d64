#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ddsafe::poly {

/// Power product x1^a1 * ... * xn^an over a fixed number of state variables.
///
/// Ordering is graded lexicographic: lower total degree first; within a
/// degree, larger exponent on x1 first (then x2, ...). With this order the
/// degree-2 monomials in two variables enumerate as x1^2, x1*x2, x2^2.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  /// The constant monomial 1 in `n` variables.
  static Monomial one(int n);
  /// x_i^power in `n` variables (0-based index).
  static Monomial variable(int n, int i, int power = 1);

  int dimension() const { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  int exponent(int i) const { return exponents_[static_cast<std::size_t>(i)]; }
  std::span<const int> exponents() const { return exponents_; }

  double evaluate(std::span<const double> x) const;

  /// Exponent-wise sum; both factors must share a dimension.
  Monomial operator*(const Monomial& other) const;

  /// Divides out one power of x_i; requires exponent(i) > 0.
  Monomial lowered(int i) const;

  /// "x1^2*x2" style rendering; the constant monomial renders as "1".
  std::string to_string(std::span<const std::string> names = {}) const;

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.exponents_ == b.exponents_;
  }
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// Default variable names x1..xn.
std::vector<std::string> default_variable_names(int n);

}  // namespace ddsafe::poly

template <>
struct std::hash<ddsafe::poly::Monomial> {
  std::size_t operator()(const ddsafe::poly::Monomial& m) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (int e : m.exponents()) {
      h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};
