#include "ddsafe/synth/audit.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ddsafe/consistency/polytope.hpp"
#include "ddsafe/error.hpp"
#include "ddsafe/format.hpp"
#include "ddsafe/sos/gram.hpp"

namespace ddsafe::synth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GateResult make_gate(std::string name) {
  GateResult g;
  g.name = std::move(name);
  return g;
}

double max_abs_coefficient(const poly::Polynomial& p) {
  double m = 0.0;
  for (const auto& [mono, c] : p.terms()) m = std::max(m, std::abs(c));
  return m;
}

double min_eigenvalue(const Eigen::MatrixXd& Q) {
  if (Q.size() == 0) return 0.0;
  const Eigen::MatrixXd S = 0.5 * (Q + Q.transpose());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

/// Residual of expr against v^T Q v, or infinity when the Gram shape is wrong.
double gram_residual(const poly::Polynomial& expr, const GramCertificate& g, int n) {
  const auto layout = sos::make_gram_layout(n, std::max(g.degree, 0));
  if (g.degree < 0 || g.Q.rows() != layout->size() || g.Q.cols() != layout->size()) return kInf;
  return max_abs_coefficient(expr - sos::gram_polynomial(*layout, g.Q));
}

GateResult membership_gate(std::string name, const poly::Polynomial& expr, const GramCertificate& g, int n,
                           const AuditTolerances& tol) {
  GateResult r;
  r.name = std::move(name);
  const double res = gram_residual(expr, g, n);
  const double eig = std::isfinite(res) ? min_eigenvalue(g.Q) : -kInf;
  r.worst = res;
  r.passed = res <= tol.coefficient && eig >= tol.min_eigenvalue;
  r.detail = "identity residual " + format_double(res) + ", min eigenvalue " + format_double(eig);
  return r;
}

std::string point_text(const std::vector<double>& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_double(x[i]);
  return s + ")";
}

/// Tracks the worst value of a pointwise quantity that must stay <= limit.
struct PointGate {
  GateResult result;
  double limit;
  std::size_t checked = 0;

  PointGate(std::string name, double lim) : limit(lim) {
    result.name = std::move(name);
    result.worst = -kInf;
  }
  void observe(double value, const std::vector<double>& x) {
    ++checked;
    if (!(value <= result.worst) || std::isnan(value)) {
      result.worst = value;
      result.witness = x;
    }
  }
  GateResult finish(const std::string& what) {
    if (checked == 0) {
      result.passed = true;
      result.worst = 0.0;
      result.detail = what + ": no audit point in range";
      return result;
    }
    result.passed = result.worst <= limit;
    result.detail = what + " over " + std::to_string(checked) + " points; worst " + format_double(result.worst);
    if (result.witness) result.detail += " at " + point_text(*result.witness);
    return result;
  }
};

}  // namespace

bool Audit::passed() const {
  return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.passed; });
}

const GateResult* Audit::first_failure() const {
  for (const auto& g : gates)
    if (!g.passed) return &g;
  return nullptr;
}

const GateResult* Audit::gate(const std::string& name) const {
  for (const auto& g : gates)
    if (g.name == name) return &g;
  return nullptr;
}

Audit check_certificate(const SafetyCertificate& cert, const SynthesisSpec& spec, const AuditTolerances& tol) {
  const int n = spec.dict.n;
  if (cert.n != n) throw StructuralError("certificate dimension differs from the problem dimension");
  Audit audit;
  const auto& P = spec.P1;
  const auto faces = static_cast<std::size_t>(P.rows());

  // Set descriptions must be the ones the problem reduces to.
  {
    GateResult g = make_gate("sets");
    const auto h = model::reduced_h(spec.Xu, spec.search_box);
    const auto k = model::reduced_h(spec.X0, spec.search_box);
    g.worst = std::max(poly::max_coefficient_difference(h, cert.h), poly::max_coefficient_difference(k, cert.k));
    g.passed = g.worst <= 1e-12;
    g.detail = "max coefficient difference of h, k from the configured sets " + format_double(g.worst);
    audit.gates.push_back(std::move(g));
  }

  GateResult a1 = make_gate("identity");
  if (cert.y.size() != faces || cert.y_grams.size() != faces) {
    a1.passed = false;
    a1.worst = kInf;
    a1.detail = "certificate has " + std::to_string(cert.y.size()) + " multipliers for " + std::to_string(faces) + " faces";
  } else {
    const auto r = poly::build_r(cert.rho, cert.psi, spec.dict.phi, spec.dict.gamma, n);
    for (Eigen::Index j = 0; j < P.columns(); ++j) {
      poly::Polynomial lhs(n);
      for (std::size_t i = 0; i < faces; ++i)
        if (P.N(static_cast<Eigen::Index>(i), j) != 0.0) lhs += P.N(static_cast<Eigen::Index>(i), j) * cert.y[i];
      const double res = poly::max_coefficient_difference(lhs, r[static_cast<std::size_t>(j)]);
      if (res > a1.worst) {
        a1.worst = res;
        a1.detail = "worst column " + std::to_string(j);
      }
    }
    a1.passed = a1.worst <= tol.coefficient;
    a1.detail = "max |coeff(y^T N - r)| " + format_double(a1.worst) + (a1.detail.empty() ? "" : ", " + a1.detail);
  }
  audit.gates.push_back(a1);

  const poly::Polynomial rho_h = cert.rho * cert.h;
  poly::Polynomial ye(n);
  if (cert.y.size() == faces)
    for (std::size_t i = 0; i < faces; ++i) ye += P.e(static_cast<Eigen::Index>(i)) * cert.y[i];
  const std::array<poly::Polynomial, 5> exprs = {
      -rho_h - ye - poly::Polynomial::constant(n, cert.c1),
      -rho_h - cert.psi,
      -rho_h + cert.psi,
      cert.rho - cert.s1 * cert.k,
      -cert.rho - cert.s2 * cert.h - poly::Polynomial::constant(n, cert.c2),
  };
  for (std::size_t i = 0; i < exprs.size(); ++i)
    audit.gates.push_back(membership_gate(kMembershipNames[i], exprs[i], cert.membership_grams[i], n, tol));

  GateResult a7 = make_gate("multipliers");
  double worst_eig = kInf;
  if (cert.y.size() == cert.y_grams.size()) {
    for (std::size_t i = 0; i < cert.y.size(); ++i) {
      const double res = gram_residual(cert.y[i], cert.y_grams[i], n);
      const double eig = std::isfinite(res) ? min_eigenvalue(cert.y_grams[i].Q) : -kInf;
      if (res > a7.worst || eig < worst_eig) a7.detail = "worst face " + std::to_string(i);
      a7.worst = std::max(a7.worst, res);
      worst_eig = std::min(worst_eig, eig);
    }
    a7.passed = a7.worst <= tol.coefficient && worst_eig >= tol.min_eigenvalue;
    a7.detail = "identity residual " + format_double(a7.worst) + ", min eigenvalue " + format_double(worst_eig) + ", " + a7.detail;
  } else {
    a7.passed = false;
    a7.worst = kInf;
    a7.detail = "multiplier and Gram counts differ";
  }
  audit.gates.push_back(a7);

  GateResult a8 = membership_gate("set-multipliers", cert.s1, cert.s1_gram, n, tol);
  const GateResult a8b = membership_gate("set-multipliers", cert.s2, cert.s2_gram, n, tol);
  a8.passed = a8.passed && a8b.passed;
  a8.worst = std::max(a8.worst, a8b.worst);
  a8.detail = "s1: " + a8.detail + "; s2: " + a8b.detail;
  audit.gates.push_back(a8);

  GateResult a9 = make_gate("positive-margins");
  a9.worst = std::min(cert.c1, cert.c2);
  a9.passed = a9.worst >= tol.margin;
  a9.detail = "c1 = " + format_double(cert.c1) + ", c2 = " + format_double(cert.c2);
  audit.gates.push_back(a9);
  return audit;
}

Audit verify_theorem_conditions(const SafetyCertificate& cert, const SynthesisSpec& spec,
                                const std::vector<std::vector<double>>& points, const AuditTolerances& tol,
                                unsigned threads) {
  const int n = spec.dict.n;
  if (cert.n != n) throw StructuralError("certificate dimension differs from the problem dimension");
  Audit audit;
  const auto& P = spec.P1;
  const auto faces = static_cast<std::size_t>(P.rows());

  GateResult a18 = make_gate("identity-grid");
  if (cert.y.size() != faces) {
    a18.passed = false;
    a18.worst = kInf;
    a18.detail = "multiplier count " + std::to_string(cert.y.size()) + " differs from face count " + std::to_string(faces);
  } else {
    const auto r = poly::build_r(cert.rho, cert.psi, spec.dict.phi, spec.dict.gamma, n);
    for (Eigen::Index j = 0; j < P.columns(); ++j) {
      poly::Polynomial lhs(n);
      for (std::size_t i = 0; i < faces; ++i) lhs += P.N(static_cast<Eigen::Index>(i), j) * cert.y[i];
      a18.worst = std::max(a18.worst, poly::max_coefficient_difference(lhs, r[static_cast<std::size_t>(j)]));
    }
    a18.passed = a18.worst <= tol.coefficient;
    a18.detail = "max |coeff(y^T N - r)| " + format_double(a18.worst);
  }
  audit.gates.push_back(a18);

  PointGate g_margin("margin-grid", tol.pointwise);
  PointGate g_psi("psi-bound-grid", tol.pointwise);
  PointGate g_initial("initial-set-grid", tol.pointwise);
  PointGate g_unsafe("unsafe-set-grid", 0.0);
  PointGate gpsi("psi-vanishing", tol.pointwise);
  const bool multipliers_ok = cert.y.size() == faces;
  for (const auto& x : points) {
    const double rho = cert.rho.evaluate(x);
    const double h = cert.h.evaluate(x);
    const double psi = cert.psi.evaluate(x);
    if (multipliers_ok) {
      double ye = 0.0;
      for (std::size_t i = 0; i < faces; ++i) ye += P.e(static_cast<Eigen::Index>(i)) * cert.y[i].evaluate(x);
      g_margin.observe(ye + rho * h + cert.c1, x);
    }
    g_psi.observe(std::abs(psi) + rho * h, x);
    // rho >= 0 on X0 and rho < 0 on Xu; tracked as -rho <= 0 and rho < 0.
    if (model::set_contains(spec.X0, x)) g_initial.observe(-rho, x);
    if (model::set_contains(spec.Xu, x)) g_unsafe.observe(rho, x);
    if (std::abs(rho) <= tol.rho_zero && h < 0.0) gpsi.observe(std::abs(psi) + rho * h, x);
  }
  if (!multipliers_ok) {
    g_margin.result.passed = false;
    g_margin.result.detail = "multiplier count differs from face count";
    audit.gates.push_back(g_margin.result);
  } else {
    audit.gates.push_back(g_margin.finish("y^T e + rho h + c1"));
  }
  audit.gates.push_back(g_psi.finish("|psi| + rho h"));
  audit.gates.push_back(g_initial.finish("-rho on X0"));
  GateResult e = g_unsafe.finish("rho on Xu");
  if (g_unsafe.checked > 0) e.passed = e.worst < 0.0;
  audit.gates.push_back(e);
  audit.gates.push_back(gpsi.finish("|psi| + rho h near rho = 0"));

  GateResult oracle = make_gate("lp-oracle");
  oracle.worst = kInf;
  try {
    const consistency::ContainmentOracle lp(P, cert.rho, cert.psi, cert.h, spec.dict);
    const auto results = lp.sweep(points, threads);
    for (std::size_t i = 0; i < results.size(); ++i)
      if (results[i].margin < oracle.worst) {
        oracle.worst = results[i].margin;
        oracle.witness = points[i];
      }
    oracle.passed = points.empty() || oracle.worst > tol.oracle;
    if (points.empty()) oracle.worst = 0.0;
    oracle.detail = "min margin -rho h - max r.theta " + format_double(oracle.worst) + " over " +
                    std::to_string(points.size()) + " points";
    if (oracle.witness) oracle.detail += " at " + point_text(*oracle.witness);
  } catch (const NumericalError& err) {
    oracle.passed = false;
    oracle.detail = err.what();
  }
  audit.gates.push_back(oracle);
  return audit;
}

std::vector<std::vector<double>> grid_points(const model::Box& box, int per_axis) {
  const int n = box.dimension();
  if (per_axis < 1) throw StructuralError("grid needs at least one point per axis");
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(per_axis);
  std::vector<std::vector<double>> pts;
  pts.reserve(total);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto si = static_cast<std::size_t>(i);
      x[si] = per_axis == 1 ? 0.5 * (box.lo[si] + box.hi[si])
                            : box.lo[si] + (box.hi[si] - box.lo[si]) * idx[si] / (per_axis - 1);
    }
    pts.push_back(std::move(x));
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[static_cast<std::size_t>(i)] < per_axis) break;
      idx[static_cast<std::size_t>(i)] = 0;
    }
  }
  return pts;
}

std::vector<std::vector<double>> uniform_points(const model::Box& box, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(std::max(count, 0)));
  for (auto& x : pts) {
    x.resize(box.lo.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::uniform_real_distribution<double>(box.lo[i], box.hi[i])(rng);
  }
  return pts;
}

int default_audit_per_axis(int n) {
  switch (n) {
    case 1: return 1001;
    case 2: return 101;
    case 3: return 21;
    default: return 9;
  }
}

AuditRecord summarize(const Audit& audit, const std::string& grid, std::size_t points) {
  AuditRecord r;
  r.grid = grid;
  r.points = points;
  auto worst = [&](const char* name) {
    const auto* g = audit.gate(name);
    return g ? g->worst : 0.0;
  };
  r.worst_margin = worst("margin-grid");
  r.worst_psi_bound = worst("psi-bound-grid");
  r.min_rho_x0 = -worst("initial-set-grid");
  r.max_rho_xu = worst("unsafe-set-grid");
  r.min_oracle_margin = worst("lp-oracle");
  return r;
}

}  // namespace ddsafe::synth
