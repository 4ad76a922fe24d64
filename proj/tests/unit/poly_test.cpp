#include <gtest/gtest.h>

#include <random>

#include "ddsafe/error.hpp"
#include "ddsafe/poly/basis.hpp"
#include "ddsafe/poly/parser.hpp"
#include "ddsafe/poly/polynomial.hpp"
#include "random_poly.hpp"

namespace ddsafe::poly {
namespace {

using testing::random_integer_poly;
using testing::random_point;
using testing::relative_error;

const std::vector<std::string> kX12 = {"x1", "x2"};
const std::vector<std::string> kX123 = {"x1", "x2", "x3"};

Polynomial P(std::string_view s, const std::vector<std::string>& vars = kX12) {
  return parse_polynomial(s, vars);
}

TEST(Monomial, GradedLexOrder) {
  const auto basis = monomial_basis(2, 0, 2);
  ASSERT_EQ(basis.size(), 6u);
  EXPECT_EQ(basis[0], Monomial::one(2));
  EXPECT_EQ(basis[1], Monomial::variable(2, 0));
  EXPECT_EQ(basis[2], Monomial::variable(2, 1));
  EXPECT_EQ(basis[3], Monomial::variable(2, 0, 2));
  EXPECT_EQ(basis[4], Monomial(std::vector<int>{1, 1}));
  EXPECT_EQ(basis[5], Monomial::variable(2, 1, 2));
  for (std::size_t i = 1; i < basis.size(); ++i) EXPECT_LT(basis[i - 1], basis[i]);
}

TEST(MonomialBasis, Counts) {
  EXPECT_EQ(monomial_basis(2, 0, 4).size(), 15u);
  EXPECT_EQ(monomial_basis(2, 1, 3).size(), 9u);
  EXPECT_EQ(2 * monomial_basis(2, 1, 3).size(), 18u);
  const auto one = monomial_basis(1, 0, 0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].degree(), 0);
  EXPECT_EQ(monomial_basis(3, 1, 3).size(), 19u);
  EXPECT_THROW(monomial_basis(2, 3, 1), StructuralError);
}

TEST(MonomialBasis, SizeLawAndNoDuplicates) {
  for (int n = 1; n <= 4; ++n) {
    for (int dmin = 0; dmin <= 3; ++dmin) {
      for (int dmax = dmin; dmax <= 5; ++dmax) {
        const auto b = monomial_basis(n, dmin, dmax);
        const auto expected = binomial(n + dmax, dmax) - binomial(n + dmin - 1, dmin - 1);
        EXPECT_EQ(static_cast<std::int64_t>(b.size()), expected) << n << " " << dmin << " " << dmax;
        for (std::size_t i = 1; i < b.size(); ++i) ASSERT_LT(b[i - 1], b[i]);
      }
    }
  }
}

TEST(PolyMul, DifferenceOfSquares) {
  EXPECT_EQ(P("x1 + 1") * P("x1 - 1"), P("x1^2 - 1"));
}

TEST(PolyMul, OneIsIdentity) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto p = random_integer_poly(rng, 3, 4);
    EXPECT_EQ(Polynomial::constant(3, 1.0) * p, p);
  }
}

TEST(PolyMul, DimensionMismatchThrows) {
  EXPECT_THROW(Polynomial::variable(2, 0) * Polynomial::variable(3, 0), StructuralError);
}

// Oracle: evaluate the two factors pointwise on a 5x5 grid, interpolate the
// tensor-degree-4 polynomial through those values, compare coefficients.
TEST(PolyMul, UnsafeDiskProductMatchesInterpolationOracle) {
  const auto h1 = P("0.16 - (x1+1)^2 - (x2+1)^2");
  const auto h2 = P("0.16 - (x1+1)^2 - (x2-1)^2");
  const auto prod = h1 * h2;
  EXPECT_EQ(prod.degree(), 4);

  const double nodes[5] = {-2, -1, 0, 1, 2};
  Eigen::MatrixXd V(25, 25);
  Eigen::VectorXd vals(25);
  int row = 0;
  for (double a : nodes) {
    for (double b : nodes) {
      auto f1 = [&](double x1, double x2) { return 0.16 - (x1 + 1) * (x1 + 1) - (x2 + 1) * (x2 + 1); };
      auto f2 = [&](double x1, double x2) { return 0.16 - (x1 + 1) * (x1 + 1) - (x2 - 1) * (x2 - 1); };
      vals(row) = f1(a, b) * f2(a, b);
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) V(row, 5 * i + j) = std::pow(a, i) * std::pow(b, j);
      }
      ++row;
    }
  }
  const Eigen::VectorXd c = V.fullPivLu().solve(vals);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double got = prod.coefficient(Monomial(std::vector<int>{i, j}));
      EXPECT_NEAR(got, c(5 * i + j), 1e-9) << "x1^" << i << " x2^" << j;
    }
  }
}

TEST(PartialDerivative, PowerRuleAndConstant) {
  EXPECT_EQ(partial_derivative(P("x1^3"), 0), P("3*x1^2"));
  EXPECT_TRUE(partial_derivative(Polynomial::constant(2, 4.5), 1).is_zero());
  EXPECT_THROW(partial_derivative(P("x1"), 2), StructuralError);
  EXPECT_THROW(partial_derivative(P("x1"), -1), StructuralError);
}

TEST(PartialDerivative, FiniteDifferenceOracle) {
  const auto p = P("x1*x2^2");
  const auto dp = partial_derivative(p, 1);
  EXPECT_EQ(dp, P("2*x1*x2"));
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    auto x = random_point(rng, 2, 2.0);
    const double h = 1e-5;
    auto xp = x, xm = x;
    xp[1] += h;
    xm[1] -= h;
    const double fd = (p.evaluate(xp) - p.evaluate(xm)) / (2 * h);
    EXPECT_LE(relative_error(dp.evaluate(x), fd), 1e-8);
  }
}

TEST(Divergence, FlowTwistIdentity) {
  const PolyVector flow(2, {P("x2"), P("-x1 + 1/3*x1^3 - x2")});
  EXPECT_EQ(divergence(flow), Polynomial::constant(2, -1.0));

  const PolyVector twist(3, {P("-2.5*x1 + x2 - 0.5*x3 + 2*x1^3 + 2*x3^3", kX123),
                             P("-x1 + 1.5*x2 + 0.5*x3 - 2*x2^3 - 2*x3^3", kX123),
                             P("1.5*x1 + 2.5*x2 - 2*x3 - 2*x1^3 - 2*x2^3", kX123)});
  EXPECT_LE(max_coefficient_difference(divergence(twist), P("-3 + 6*x1^2 - 6*x2^2", kX123)), 1e-14);

  for (int n = 1; n <= 4; ++n) {
    std::vector<Polynomial> id;
    for (int i = 0; i < n; ++i) id.push_back(Polynomial::variable(n, i));
    EXPECT_EQ(divergence(PolyVector(n, id)), Polynomial::constant(n, n));
  }
  EXPECT_THROW(divergence(PolyVector(2, 3)), StructuralError);
}

TEST(BuildR, OneDimensional) {
  const std::vector<std::string> x = {"x1"};
  const auto r = build_r(parse_polynomial("x1^2", x), Polynomial(1), PolyVector(1, {parse_polynomial("x1", x)}),
                         PolyVector(1, {Polynomial::constant(1, 1.0)}), 1);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], parse_polynomial("-3*x1^2", x));
  EXPECT_TRUE(r[1].is_zero());
  EXPECT_EQ(r[2], parse_polynomial("-2*x1", x));
}

TEST(BuildR, ZeroRhoPsiGivesZeroVector) {
  const auto phi = PolyVector(2, {P("x1"), P("x2"), P("x1^2")});
  const auto gamma = PolyVector(2, {P("1")});
  const auto r = build_r(Polynomial(2), Polynomial(2), phi, gamma, 2);
  ASSERT_EQ(r.size(), 2u * 3 + 2u * 1 + 2u);
  for (const auto& e : r) EXPECT_TRUE(e.is_zero());
}

TEST(BuildR, TwoDimensionalExample) {
  const auto r = build_r(P("x1"), P("1"), PolyVector(2, {P("x1"), P("x2")}), PolyVector(2, {P("1")}), 2);
  const std::vector<Polynomial> want = {P("-2*x1"), P("-x2"), P("0"), P("-x1"),
                                        P("0"),     P("0"),   P("-1"), P("0")};
  ASSERT_EQ(r.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(r[i], want[i]) << i;
}

TEST(BuildR, EmptyDictionaryThrows) {
  EXPECT_THROW(build_r(P("x1"), P("1"), PolyVector(2, 0), PolyVector(2, {P("1")}), 2), StructuralError);
}

// div(rho*F*phi + psi*G*gamma + rho*w) == -r . (vec(F^T); vec(G^T); w)
// checked symbolically (1e-9) and against central differences (1e-6).
TEST(BuildR, DefiningIdentity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 2;
  const auto phi = PolyVector(n, {P("x1"), P("x2"), P("x1^2"), P("x1*x2^2")});
  const auto gamma = PolyVector(n, {P("1"), P("x1")});
  for (int trial = 0; trial < 10; ++trial) {
    const auto rho = testing::random_real_poly(rng, n, 3);
    const auto psi = testing::random_real_poly(rng, n, 2);
    const auto r = build_r(rho, psi, phi, gamma, n);
    Eigen::MatrixXd F(n, phi.size()), G(n, gamma.size());
    Eigen::VectorXd w(n);
    F = Eigen::MatrixXd::NullaryExpr(n, phi.size(), [&]() { return u(rng); });
    G = Eigen::MatrixXd::NullaryExpr(n, gamma.size(), [&]() { return u(rng); });
    w = Eigen::VectorXd::NullaryExpr(n, [&]() { return u(rng); });
    Eigen::VectorXd theta(r.size());
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < F.cols(); ++j) theta(k++) = F(i, j);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < G.cols(); ++j) theta(k++) = G(i, j);
    for (int i = 0; i < n; ++i) theta(k++) = w(i);

    std::vector<Polynomial> field;
    for (int i = 0; i < n; ++i) {
      Polynomial fi(n), gi(n);
      for (std::size_t j = 0; j < phi.size(); ++j) fi += F(i, j) * phi[j];
      for (std::size_t j = 0; j < gamma.size(); ++j) gi += G(i, j) * gamma[j];
      field.push_back(rho * fi + psi * gi + w(i) * rho);
    }
    const Polynomial lhs = divergence(PolyVector(n, field));
    for (int p = 0; p < 10; ++p) {
      auto x = random_point(rng, n, 2.0);
      const double rhs = -r.evaluate(x).dot(theta);
      EXPECT_LE(relative_error(lhs.evaluate(x), rhs), 1e-9);

      auto scalar_field = [&](int i, std::vector<double> pt) {
        double fi = 0, gi = 0;
        const auto ph = phi.evaluate(pt);
        const auto ga = gamma.evaluate(pt);
        for (int j = 0; j < F.cols(); ++j) fi += F(i, j) * ph(j);
        for (int j = 0; j < G.cols(); ++j) gi += G(i, j) * ga(j);
        return rho.evaluate(pt) * (fi + w(i)) + psi.evaluate(pt) * gi;
      };
      double fd = 0;
      const double h = 1e-5;
      for (int i = 0; i < n; ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        fd += (scalar_field(i, xp) - scalar_field(i, xm)) / (2 * h);
      }
      EXPECT_LE(relative_error(fd, rhs), 1e-6);
    }
  }
}

TEST(PolyProperties, ProductRuleExact) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 3; ++n) {
    for (int t = 0; t < 10; ++t) {
      const auto rho = random_integer_poly(rng, n, 4);
      std::vector<Polynomial> f;
      for (int i = 0; i < n; ++i) f.push_back(random_integer_poly(rng, n, 4));
      const PolyVector field(n, f);
      EXPECT_EQ(divergence(scale_field(rho, field)), dot(gradient(rho), field) + rho * divergence(field));
    }
  }
}

TEST(PolyProperties, EvaluationHomomorphism) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + t % 3;
    const auto a = testing::random_real_poly(rng, n, 3);
    const auto b = testing::random_real_poly(rng, n, 3);
    const auto x = random_point(rng, n, 1.5);
    EXPECT_LE(relative_error((a * b).evaluate(x), a.evaluate(x) * b.evaluate(x)), 1e-10);
    EXPECT_LE(relative_error((a + b).evaluate(x), a.evaluate(x) + b.evaluate(x)), 1e-10);
  }
}

TEST(PolyCanonical, DropsTinyCoefficients) {
  auto p = P("x1 + 1e-13*x2");
  EXPECT_EQ(p.size(), 1u);
  auto q = P("x1 + 1") - P("x1 + 1 + 5e-13*x2");
  EXPECT_TRUE(q.is_zero());
  EXPECT_EQ(q.degree(), -1);
}

TEST(Parser, Examples) {
  const auto p = P("0.25 - x1^2 - (x2+3)^2");
  EXPECT_EQ(p, P("-8.75 - x1^2 - x2^2 - 6*x2"));
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<double>{0, 0}), -8.75);
  EXPECT_EQ(P("x1"), Polynomial::variable(2, 0));
  const auto cubic = P("1/3*x1^3");
  EXPECT_NEAR(cubic.evaluate(std::vector<double>{3, 0}), 9.0, 1e-12);
  EXPECT_EQ(P("-x1 + 2"), P("2 - x1"));
  EXPECT_EQ(P(" 2 * ( x1 ) ^ 2 "), P("2*x1^2"));
  EXPECT_EQ(P("1.5e-1*x2"), P("0.15*x2"));
}

TEST(Parser, Errors) {
  auto position_of = [](std::string_view s) -> std::size_t {
    try {
      parse_polynomial(s, kX12);
    } catch (const ParseError& e) {
      return e.position();
    }
    return std::string::npos;
  };
  EXPECT_EQ(position_of("x1 + y"), 5u);
  EXPECT_EQ(position_of("x1^2.5"), 3u);
  EXPECT_EQ(position_of("x1^-1"), 3u);
  EXPECT_EQ(position_of("2x1"), 1u);
  EXPECT_EQ(position_of("(x1 + 1"), 7u);
  EXPECT_EQ(position_of("x1 +"), 4u);
  EXPECT_EQ(position_of("1/0"), 2u);
  EXPECT_EQ(position_of("x1 $ 2"), 3u);
}

std::string random_expression(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_int_distribution<int> small(1, 9);
  std::uniform_int_distribution<int> var(0, 1);
  const int k = depth <= 0 ? pick(rng) % 3 : pick(rng);
  switch (k) {
    case 0: return std::to_string(small(rng)) + "." + std::to_string(small(rng));
    case 1: return kX12[var(rng)];
    case 2: return std::to_string(small(rng)) + "/" + std::to_string(small(rng));
    case 3: return random_expression(rng, depth - 1) + " - " + random_expression(rng, depth - 1);
    case 4: return random_expression(rng, depth - 1) + "*" + random_expression(rng, depth - 1);
    default: return "(" + random_expression(rng, depth - 1) + ")^" + std::to_string(small(rng) % 3 + 1);
  }
}

TEST(Parser, ParsePrintParseFixpoint) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 50; ++t) {
    const std::string expr = random_expression(rng, 4);
    const auto p1 = P(expr);
    const std::string printed = p1.to_string(kX12);
    const auto p2 = P(printed);
    EXPECT_EQ(p1, p2) << expr << "  =>  " << printed;
    EXPECT_EQ(p2.to_string(kX12), printed);
  }
}

}  // namespace
}  // namespace ddsafe::poly
