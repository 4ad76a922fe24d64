#include "ddsafe/sos/program.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>

#include "ddsafe/error.hpp"
#include "ddsafe/poly/basis.hpp"

namespace ddsafe::sos {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasibleCertified: return "infeasible-certified";
    case SolveStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

PolyExpr UnknownPoly::expr() const {
  PolyExpr e(n);
  for (std::size_t i = 0; i < basis.size(); ++i) e.add(basis[i], VarRef::scalar(handles[i]), 1.0);
  return e;
}

PolyExpr SosPoly::expr() const {
  PolyExpr e(layout->n);
  for (std::size_t a = 0; a < layout->products.size(); ++a)
    e.add(layout->products[a], VarRef::gram_atom(block, static_cast<int>(a)), 1.0);
  return e;
}

PolyExpr SosFamily::combo(const Eigen::VectorXd& weights) const {
  if (weights.size() != count) throw StructuralError("family combination needs one weight per member");
  PolyExpr e(layout->n);
  e.add_combo(id, weights);
  return e;
}

SosProgram::SosProgram(int n) : n_(n) {
  if (n < 1) throw StructuralError("SOS program needs at least one variable");
}

std::shared_ptr<const GramLayout> SosProgram::layout(int degree) {
  auto it = layouts_.find(degree);
  if (it == layouts_.end()) it = layouts_.emplace(degree, make_gram_layout(n_, degree)).first;
  return it->second;
}

int SosProgram::new_block(int degree, std::string label, int family) {
  blocks_.push_back({layout(degree), std::move(label), family});
  return static_cast<int>(blocks_.size()) - 1;
}

int SosProgram::declare_scalar(ScalarDomain domain, std::string label) {
  scalars_.push_back({domain, std::move(label)});
  return static_cast<int>(scalars_.size()) - 1;
}

UnknownPoly SosProgram::declare_poly(int degree, std::string label) {
  if (degree < 0) throw StructuralError("unknown polynomial degree must be non-negative");
  UnknownPoly p;
  p.id = next_poly_id_++;
  p.n = n_;
  p.degree = degree;
  p.basis = poly::monomial_basis(n_, 0, degree);
  for (const auto& m : p.basis) p.handles.push_back(declare_scalar(ScalarDomain::kFree, label + "[" + m.to_string() + "]"));
  return p;
}

SosPoly SosProgram::declare_sos(int degree, std::string label) {
  if (degree < 0) throw StructuralError("SOS degree must be non-negative");
  SosPoly p;
  p.id = next_poly_id_++;
  p.block = new_block(degree, std::move(label), -1);
  p.layout = blocks_[static_cast<std::size_t>(p.block)].layout;
  return p;
}

SosFamily SosProgram::declare_sos_family(int count, int degree, std::string label) {
  if (count < 1) throw StructuralError("SOS family needs at least one member");
  if (degree < 0) throw StructuralError("SOS degree must be non-negative");
  SosFamily f;
  f.id = static_cast<int>(families_.size());
  f.count = count;
  f.layout = layout(degree);
  for (int i = 0; i < count; ++i) f.blocks.push_back(new_block(degree, label + "[" + std::to_string(i) + "]", f.id));
  families_.push_back(f);
  return f;
}

int SosProgram::add_sos(const PolyExpr& expression, int d, std::string label) {
  if (d < 0) throw StructuralError("Gram degree must be non-negative in " + label);
  if (expression.dimension() != 0 && expression.dimension() != n_)
    throw StructuralError("expression dimension differs from program in " + label);
  for (const auto& [m, f] : expression.coefficients())
    if (m.degree() > 2 * d)
      throw StructuralError("degree overflow in " + label + ": monomial " + m.to_string() + " has degree " +
                            std::to_string(m.degree()) + " > 2d = " + std::to_string(2 * d));
  for (const auto& c : expression.combos()) {
    const auto& fam = families_.at(static_cast<std::size_t>(c.family));
    if (fam.layout->degree > d && c.weights.cwiseAbs().maxCoeff() > 0.0)
      throw StructuralError("degree overflow in " + label + ": family member of degree " +
                            std::to_string(2 * fam.layout->degree) + " > 2d = " + std::to_string(2 * d));
  }
  const int block = new_block(d, label, -1);
  identities_.push_back({expression, block, std::move(label)});
  return block;
}

std::pair<int, int> SosProgram::add_coeff_equality(const PolyExpr& lhs, const PolyExpr& rhs, std::string label) {
  Identity id{lhs - rhs, -1, std::move(label)};
  const int count = static_cast<int>(identity_support(id).size());
  identities_.push_back(std::move(id));
  return {static_cast<int>(identities_.size()) - 1, count};
}

void SosProgram::add_scalar_equality(const std::map<int, double>& terms, double rhs, std::string label) {
  linear_.push_back({terms, rhs, false, std::move(label)});
}

void SosProgram::add_scalar_inequality(const std::map<int, double>& terms, double rhs, std::string label) {
  linear_.push_back({terms, rhs, true, std::move(label)});
}

void SosProgram::maximize(const std::map<int, double>& weights) { objective_ = weights; }

void SosProgram::set_trace_bound(double bound) {
  if (!(bound > 0.0)) throw ConfigError("trace bound must be positive");
  trace_bound_ = bound;
}

std::vector<poly::Monomial> SosProgram::identity_support(const Identity& id) const {
  std::set<poly::Monomial> sup;
  for (const auto& [m, f] : id.expr.coefficients()) sup.insert(m);
  for (const auto& c : id.expr.combos())
    if (c.weights.size() > 0 && c.weights.cwiseAbs().maxCoeff() > 0.0)
      for (const auto& m : families_[static_cast<std::size_t>(c.family)].layout->products) sup.insert(m);
  if (id.block >= 0)
    for (const auto& m : blocks_[static_cast<std::size_t>(id.block)].layout->products) sup.insert(m);
  return {sup.begin(), sup.end()};
}

sdp::ConicProblem SosProgram::compile() const {
  sdp::ConicProblem P;
  for (const auto& s : scalars_)
    P.scalars.push_back({s.domain == ScalarDomain::kFree ? sdp::ScalarKind::kFree : sdp::ScalarKind::kNonneg, s.label});
  for (const auto& b : blocks_) P.blocks.push_back({b.layout->size(), b.layout->atoms, b.label});

  std::vector<sdp::BlockFamily> fams(families_.size());
  for (std::size_t f = 0; f < families_.size(); ++f) {
    for (int k : families_[f].blocks) fams[f].members.push_back(k);
    fams[f].coef.resize(families_[f].count, 0);
  }
  auto add_column = [&](int family, const Eigen::VectorXd& w, std::vector<int> rows) {
    auto& bf = fams[static_cast<std::size_t>(family)];
    bf.coef.conservativeResize(Eigen::NoChange, bf.coef.cols() + 1);
    bf.coef.col(bf.coef.cols() - 1) = w;
    bf.rows.push_back(std::move(rows));
  };

  for (const auto& id : identities_) {
    const auto support = identity_support(id);
    std::map<poly::Monomial, int> row_of;
    for (const auto& m : support) {
      sdp::EqualityRow row;
      row.label = id.label + "[" + m.to_string() + "]";
      auto it = id.expr.coefficients().find(m);
      if (it != id.expr.coefficients().end()) {
        row.rhs = -it->second.constant;
        for (const auto& [v, c] : it->second.terms) {
          if (v.kind == VarRef::kScalar)
            row.scalars.push_back({v.index, c});
          else
            row.blocks.push_back({v.index, v.atom, c});
        }
      }
      if (id.block >= 0) {
        const auto& lay = *blocks_[static_cast<std::size_t>(id.block)].layout;
        row.blocks.push_back({id.block, lay.atom_of.at(m), -1.0});
      }
      row_of[m] = static_cast<int>(P.rows.size());
      P.rows.push_back(std::move(row));
    }
    for (const auto& c : id.expr.combos()) {
      if (c.weights.size() == 0 || c.weights.cwiseAbs().maxCoeff() == 0.0) continue;
      const auto& lay = *families_[static_cast<std::size_t>(c.family)].layout;
      std::vector<int> rows(lay.products.size() + 1, -1);
      for (std::size_t a = 0; a < lay.products.size(); ++a) rows[a] = row_of.at(lay.products[a]);
      add_column(c.family, c.weights, std::move(rows));
    }
  }

  int slack = static_cast<int>(P.scalars.size());
  for (const auto& lin : linear_) {
    sdp::EqualityRow row;
    row.label = lin.label;
    row.rhs = lin.rhs;
    for (const auto& [h, c] : lin.terms) row.scalars.push_back({h, c});
    if (lin.inequality) {
      P.scalars.push_back({sdp::ScalarKind::kNonneg, lin.label + ".slack"});
      row.scalars.push_back({slack++, 1.0});
    }
    P.rows.push_back(std::move(row));
  }

  if (trace_bound_) {
    sdp::EqualityRow row;
    row.label = "trace_bound";
    row.rhs = *trace_bound_;
    const int r = static_cast<int>(P.rows.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k)
      if (blocks_[k].family < 0) row.blocks.push_back({static_cast<int>(k), blocks_[k].layout->trace_atom(), 1.0});
    P.scalars.push_back({sdp::ScalarKind::kNonneg, "trace_bound.slack"});
    row.scalars.push_back({slack++, 1.0});
    P.rows.push_back(std::move(row));
    for (std::size_t f = 0; f < families_.size(); ++f) {
      std::vector<int> rows(families_[f].layout->products.size() + 1, -1);
      rows.back() = r;
      add_column(static_cast<int>(f), Eigen::VectorXd::Ones(families_[f].count), std::move(rows));
    }
  }

  P.objective = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(P.scalars.size()));
  for (const auto& [h, w] : objective_) P.objective(h) = -w;
  for (auto& bf : fams)
    if (bf.coef.cols() > 0) P.families.push_back(std::move(bf));
  P.validate();
  return P;
}

ProgramStats SosProgram::stats() const {
  ProgramStats st;
  st.scalar_unknowns = static_cast<int>(scalars_.size());
  st.psd_blocks = static_cast<int>(blocks_.size());
  for (const auto& b : blocks_) st.max_block_size = std::max(st.max_block_size, b.layout->size());
  for (const auto& id : identities_) st.equalities += static_cast<int>(identity_support(id).size());
  st.equalities += static_cast<int>(linear_.size()) + (trace_bound_ ? 1 : 0);
  return st;
}

SolveReport SosProgram::solve(const sdp::ConicSolver& solver, const SolveOptions& options) const {
  const auto problem = compile();
  const auto sol = solver.solve(problem, options.solver);
  SolveReport r;
  r.solver = solver.name();
  r.message = sol.message;
  r.iterations = sol.iterations;
  r.seconds = sol.seconds;
  r.primal_infeasibility = sol.primal_infeasibility;
  r.dual_infeasibility = sol.dual_infeasibility;
  r.relative_gap = sol.relative_gap;
  r.objective = -sol.primal_objective;
  r.dual_bound = -sol.dual_objective;
  switch (sol.status) {
    case sdp::SolverStatus::kOptimal: r.status = SolveStatus::kFeasible; break;
    case sdp::SolverStatus::kPrimalInfeasible: r.status = SolveStatus::kInfeasibleCertified; break;
    default: r.status = SolveStatus::kNumericalFailure; break;
  }
  r.scalars.assign(sol.scalars.data(), sol.scalars.data() + std::min<Eigen::Index>(sol.scalars.size(), scalar_count()));
  r.scalars.resize(scalars_.size(), 0.0);
  r.grams = sol.X;
  if (r.grams.size() != blocks_.size()) {
    r.grams.clear();
    for (const auto& b : blocks_) r.grams.push_back(Eigen::MatrixXd::Zero(b.layout->size(), b.layout->size()));
  }
  if (r.status == SolveStatus::kFeasible) r.verification = verify_certificate(*this, r, options.tol_feas, options.tol_psd);
  return r;
}

double SosProgram::scalar(int handle, const SolveReport& r) const { return r.scalars.at(static_cast<std::size_t>(handle)); }

poly::Polynomial SosProgram::value(const UnknownPoly& p, const SolveReport& r) const { return value(p.expr(), r); }

poly::Polynomial SosProgram::value(const SosPoly& p, const SolveReport& r) const {
  return gram_polynomial(*p.layout, r.grams.at(static_cast<std::size_t>(p.block)));
}

poly::Polynomial SosProgram::value(const SosFamily& f, int member, const SolveReport& r) const {
  return gram_polynomial(*f.layout, r.grams.at(static_cast<std::size_t>(f.blocks.at(static_cast<std::size_t>(member)))));
}

poly::Polynomial SosProgram::value(const PolyExpr& e, const SolveReport& r) const {
  poly::Polynomial out(n_);
  for (const auto& [m, f] : e.coefficients()) {
    double v = f.constant;
    for (const auto& [ref, c] : f.terms) {
      if (ref.kind == VarRef::kScalar) {
        v += c * r.scalars.at(static_cast<std::size_t>(ref.index));
      } else {
        const auto& Q = r.grams.at(static_cast<std::size_t>(ref.index));
        double a = 0.0;
        for (const auto& en : (*blocks_[static_cast<std::size_t>(ref.index)].layout->atoms)[static_cast<std::size_t>(ref.atom)])
          a += en.w * Q(en.p, en.q);
        v += c * a;
      }
    }
    out.add_term(m, v);
  }
  for (const auto& c : e.combos()) {
    const auto& fam = families_.at(static_cast<std::size_t>(c.family));
    for (int i = 0; i < fam.count; ++i)
      if (c.weights(i) != 0.0) out += c.weights(i) * value(fam, i, r);
  }
  return out;
}

namespace {

void keep_worst(std::vector<Offender>& list, Offender o, bool larger_is_worse) {
  list.push_back(std::move(o));
  std::sort(list.begin(), list.end(), [&](const Offender& a, const Offender& b) {
    return larger_is_worse ? a.value > b.value : a.value < b.value;
  });
  if (list.size() > 5) list.pop_back();
}

}  // namespace

VerificationSummary verify_certificate(const SosProgram& program, const SolveReport& report, double tol_feas,
                                       double tol_psd) {
  VerificationSummary v;
  v.tol_feas = tol_feas;
  v.tol_psd = tol_psd;
  v.min_eigenvalue = std::numeric_limits<double>::infinity();
  if (report.grams.size() != program.blocks_.size() || report.scalars.size() != program.scalars_.size()) {
    v.sound = false;
    return v;
  }
  for (const auto& id : program.identities_) {
    // Raw coefficient accumulation so no small residual is dropped.
    std::map<poly::Monomial, double> res;
    const poly::Polynomial lhs = program.value(id.expr, report);
    for (const auto& [m, c] : lhs.terms()) res[m] += c;
    if (id.block >= 0) {
      const auto& lay = *program.blocks_[static_cast<std::size_t>(id.block)].layout;
      const auto& Q = report.grams[static_cast<std::size_t>(id.block)];
      for (std::size_t a = 0; a < lay.products.size(); ++a) {
        double g = 0.0;
        for (const auto& en : (*lay.atoms)[a]) g += en.w * Q(en.p, en.q);
        res[lay.products[a]] -= g;
      }
    }
    for (const auto& [m, r] : res) {
      const double a = std::abs(r);
      if (a > v.max_coefficient_residual) v.max_coefficient_residual = a;
      if (a > 0.0) keep_worst(v.worst_residuals, {id.label, m.to_string(), a}, true);
    }
  }
  for (std::size_t k = 0; k < program.blocks_.size(); ++k) {
    const auto& Q = report.grams[k];
    const Eigen::MatrixXd S = 0.5 * (Q + Q.transpose());
    const double lmin = S.size() == 0 ? 0.0
                                      : Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S, Eigen::EigenvaluesOnly)
                                            .eigenvalues()
                                            .minCoeff();
    v.min_eigenvalue = std::min(v.min_eigenvalue, lmin);
    keep_worst(v.worst_eigenvalues, {program.blocks_[k].label, "", lmin}, false);
  }
  if (program.blocks_.empty()) v.min_eigenvalue = 0.0;
  for (const auto& lin : program.linear_) {
    double lhs = 0.0;
    for (const auto& [h, c] : lin.terms) lhs += c * report.scalars[static_cast<std::size_t>(h)];
    const double r = lin.inequality ? std::max(0.0, lhs - lin.rhs) : std::abs(lhs - lin.rhs);
    v.max_scalar_residual = std::max(v.max_scalar_residual, r);
  }
  for (std::size_t h = 0; h < program.scalars_.size(); ++h)
    if (program.scalars_[h].domain == ScalarDomain::kNonneg)
      v.max_scalar_residual = std::max(v.max_scalar_residual, -report.scalars[h]);
  v.sound = v.max_coefficient_residual <= tol_feas && v.max_scalar_residual <= tol_feas && v.min_eigenvalue >= -tol_psd;
  return v;
}

}  // namespace ddsafe::sos
