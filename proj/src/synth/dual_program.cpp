#include "ddsafe/synth/dual_program.hpp"

#include <algorithm>

#include "ddsafe/error.hpp"
#include "ddsafe/poly/basis.hpp"

namespace ddsafe::synth {

namespace {

int half_up(int degree) { return degree <= 0 ? 0 : (degree + 1) / 2; }

}  // namespace

std::vector<sos::PolyExpr> symbolic_r(const sos::UnknownPoly& rho, const sos::UnknownPoly& psi,
                                      const model::Dictionary& dict) {
  const int n = dict.n;
  const std::size_t cols = dict.plant_columns() + static_cast<std::size_t>(n);
  std::vector<sos::PolyExpr> r(cols, sos::PolyExpr(n));
  const poly::Polynomial zero(n);
  for (std::size_t a = 0; a < rho.basis.size(); ++a) {
    const auto part = poly::build_r(poly::Polynomial::from_monomial(rho.basis[a]), zero, dict.phi, dict.gamma, n);
    for (std::size_t c = 0; c < cols; ++c)
      for (const auto& [m, v] : part[c].terms()) r[c].add(m, sos::VarRef::scalar(rho.handles[a]), v);
  }
  for (std::size_t a = 0; a < psi.basis.size(); ++a) {
    const auto part = poly::build_r(zero, poly::Polynomial::from_monomial(psi.basis[a]), dict.phi, dict.gamma, n);
    for (std::size_t c = 0; c < cols; ++c)
      for (const auto& [m, v] : part[c].terms()) r[c].add(m, sos::VarRef::scalar(psi.handles[a]), v);
  }
  return r;
}

DualProgram assemble_dual_program(const SynthesisSpec& spec) {
  const int n = spec.dict.n;
  const auto& dg = spec.degrees;
  if (spec.P1.rows() == 0) throw StructuralError("consistency polytope has no faces; P1 is invalid");
  if (spec.P1.columns() != static_cast<Eigen::Index>(spec.dict.plant_columns()) + n)
    throw StructuralError("polytope columns differ from dictionary size plus disturbance dimension");
  if (spec.X0.dimension() != n || spec.Xu.dimension() != n)
    throw StructuralError("initial or unsafe set dimension differs from the state dimension");
  if (dg.rho < 0 || dg.psi < 0 || dg.d1 < 0 || dg.d2 < 0) throw StructuralError("degrees must be non-negative");
  const int need1 = std::max(spec.dict.phi.max_degree() + dg.rho, spec.dict.gamma.max_degree() + dg.psi);
  if (2 * dg.d1 < need1)
    throw StructuralError("degree rule violated: 2*d1 = " + std::to_string(2 * dg.d1) + " < max(d_f + d_rho, d_g + d_psi) = " +
                          std::to_string(need1));
  const int need2 = std::max(dg.rho, dg.psi);
  if (2 * dg.d2 < need2)
    throw StructuralError("degree rule violated: 2*d2 = " + std::to_string(2 * dg.d2) + " < max(d_rho, d_psi) = " +
                          std::to_string(need2));

  DualProgram A(n);
  auto& prog = A.program;
  A.h = model::reduced_h(spec.Xu, spec.search_box);
  A.k = model::reduced_h(spec.X0, spec.search_box);

  A.rho = prog.declare_poly(dg.rho, "rho");
  A.psi = prog.declare_poly(dg.psi, "psi");
  A.c1 = prog.declare_scalar(sos::ScalarDomain::kNonneg, "c1");
  A.c2 = prog.declare_scalar(sos::ScalarDomain::kNonneg, "c2");
  A.t = prog.declare_scalar(sos::ScalarDomain::kNonneg, "t");
  const int faces = static_cast<int>(spec.P1.rows());
  A.y = prog.declare_sos_family(faces, dg.d1, "y");
  A.s1 = prog.declare_sos(dg.d2, "s1");
  A.s2 = prog.declare_sos(dg.d2, "s2");

  // coeff_x(y^T N - r) = 0, one block of equalities per column of N.
  A.r = symbolic_r(A.rho, A.psi, spec.dict);
  for (Eigen::Index j = 0; j < spec.P1.columns(); ++j)
    prog.add_coeff_equality(A.y.combo(spec.P1.N.col(j)), A.r[static_cast<std::size_t>(j)], "identity[" + std::to_string(j) + "]");

  const sos::PolyExpr rho = A.rho.expr();
  const sos::PolyExpr psi = A.psi.expr();
  const sos::PolyExpr rho_h = rho * A.h;
  auto scalar_term = [&](int handle, double coef) {
    return sos::PolyExpr::variable(n, sos::VarRef::scalar(handle), poly::Monomial::one(n), coef);
  };

  A.membership_exprs = {
      -rho_h + A.y.combo(-spec.P1.e) + scalar_term(A.c1, -1.0),
      -rho_h - psi,
      -rho_h + psi,
      rho - A.s1.expr() * A.k,
      -rho - A.s2.expr() * A.h + scalar_term(A.c2, -1.0),
  };
  const int deg_rho_h = dg.rho + std::max(A.h.degree(), 0);
  const std::array<int, 5> expr_degree = {
      std::max(deg_rho_h, 2 * dg.d1),
      std::max(deg_rho_h, dg.psi),
      std::max(deg_rho_h, dg.psi),
      std::max(dg.rho, 2 * dg.d2 + std::max(A.k.degree(), 0)),
      std::max(dg.rho, 2 * dg.d2 + std::max(A.h.degree(), 0)),
  };
  const std::array<int, 5> base = {dg.d1, dg.d2, dg.d2, dg.d2, dg.d2};
  for (std::size_t i = 0; i < 5; ++i) {
    A.membership_degrees[i] = std::max(base[i], half_up(expr_degree[i]));
    A.membership_blocks[i] = prog.add_sos(A.membership_exprs[i], A.membership_degrees[i], kMembershipNames[i]);
  }

  // c1, c2 > 0 as a maximized margin t <= c_i <= 1 on a trace-bounded slice.
  prog.add_scalar_inequality({{A.t, 1.0}, {A.c1, -1.0}}, 0.0, "t<=c1");
  prog.add_scalar_inequality({{A.t, 1.0}, {A.c2, -1.0}}, 0.0, "t<=c2");
  prog.add_scalar_inequality({{A.c1, 1.0}}, 1.0, "c1<=1");
  prog.add_scalar_inequality({{A.c2, 1.0}}, 1.0, "c2<=1");
  prog.maximize({{A.t, 1.0}});
  double trace = static_cast<double>(faces * poly::binomial(n + dg.d1, dg.d1) + 2 * poly::binomial(n + dg.d2, dg.d2));
  for (int d : A.membership_degrees) trace += static_cast<double>(poly::binomial(n + d, d));
  prog.set_trace_bound(trace);
  return A;
}

}  // namespace ddsafe::synth
