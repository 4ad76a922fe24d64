#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <tuple>

#include "ddsafe/error.hpp"
#include "ddsafe/sdp/conic.hpp"

namespace ddsafe::sdp {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FlatAtoms {
  int count = 0;
  std::vector<int> atom, p, q;
  std::vector<double> w;
};

FlatAtoms flatten(const AtomSet& set) {
  FlatAtoms fa;
  fa.count = static_cast<int>(set.size());
  for (std::size_t a = 0; a < set.size(); ++a)
    for (const auto& e : set[a]) {
      fa.atom.push_back(static_cast<int>(a));
      fa.p.push_back(e.p);
      fa.q.push_back(e.q);
      fa.w.push_back(e.w);
    }
  return fa;
}

VectorXd atom_values(const FlatAtoms& fa, const MatrixXd& X) {
  VectorXd v = VectorXd::Zero(fa.count);
  for (std::size_t e = 0; e < fa.w.size(); ++e) v(fa.atom[e]) += fa.w[e] * X(fa.p[e], fa.q[e]);
  return v;
}

void add_atom_matrix(const FlatAtoms& fa, const Eigen::Ref<const VectorXd>& u, MatrixXd& S) {
  for (std::size_t e = 0; e < fa.w.size(); ++e) S(fa.p[e], fa.q[e]) += u(fa.atom[e]) * fa.w[e];
}

// K(a, b) = tr(A_a Zi A_b X).
void schur_kernel(const FlatAtoms& fa, const MatrixXd& X, const MatrixXd& Zi, double* K) {
  const Index s = X.rows();
  const Index na = fa.count;
  std::fill(K, K + na * na, 0.0);
  const std::size_t E = fa.w.size();
  std::vector<double> t(E);
  for (std::size_t e1 = 0; e1 < E; ++e1) {
    const double* zq = Zi.data() + static_cast<Index>(fa.q[e1]) * s;
    const double* xp = X.data() + static_cast<Index>(fa.p[e1]) * s;
    const double w1 = fa.w[e1];
    double* Ka = K + fa.atom[e1];
    for (std::size_t e2 = 0; e2 < E; ++e2) Ka[fa.atom[e2] * na] += w1 * fa.w[e2] * zq[fa.p[e2]] * xp[fa.q[e2]];
  }
}

struct GenericBlock {
  int block = 0;
  std::vector<int> rows;
  std::vector<int> atoms;
  MatrixXd L;
  std::vector<std::tuple<int, int, double>> terms;
};

struct Family {
  std::vector<int> members;
  MatrixXd C;
  Eigen::MatrixXi rowmap;  // atoms x columns
  const FlatAtoms* fa = nullptr;
};

class Structure {
 public:
  explicit Structure(const ConicProblem& P) {
    m = static_cast<int>(P.rows.size());
    nb = static_cast<int>(P.blocks.size());
    ns = static_cast<int>(P.scalars.size());
    for (const auto& b : P.blocks) {
      sizes.push_back(b.size);
      auto it = flats.find(b.atoms.get());
      if (it == flats.end()) it = flats.emplace(b.atoms.get(), flatten(*b.atoms)).first;
      atoms_of.push_back(&it->second);
    }
    b = VectorXd(m);
    for (int r = 0; r < m; ++r) b(r) = P.rows[static_cast<std::size_t>(r)].rhs;
    c = P.objective;
    scalar_cols.resize(static_cast<std::size_t>(ns));
    std::vector<std::map<std::pair<int, int>, double>> gterms(static_cast<std::size_t>(nb));
    for (int r = 0; r < m; ++r) {
      std::map<int, double> sc;
      for (const auto& t : P.rows[static_cast<std::size_t>(r)].scalars) sc[t.var] += t.coef;
      for (const auto& [v, cf] : sc)
        if (cf != 0.0) scalar_cols[static_cast<std::size_t>(v)].push_back({r, cf});
      for (const auto& t : P.rows[static_cast<std::size_t>(r)].blocks)
        gterms[static_cast<std::size_t>(t.block)][{r, t.atom}] += t.coef;
    }
    for (int k = 0; k < nb; ++k) {
      const auto& tm = gterms[static_cast<std::size_t>(k)];
      if (tm.empty()) continue;
      GenericBlock g;
      g.block = k;
      for (const auto& [ra, cf] : tm) {
        g.rows.push_back(ra.first);
        g.atoms.push_back(ra.second);
        g.terms.emplace_back(ra.first, ra.second, cf);
      }
      std::sort(g.rows.begin(), g.rows.end());
      g.rows.erase(std::unique(g.rows.begin(), g.rows.end()), g.rows.end());
      std::sort(g.atoms.begin(), g.atoms.end());
      g.atoms.erase(std::unique(g.atoms.begin(), g.atoms.end()), g.atoms.end());
      g.L = MatrixXd::Zero(static_cast<Index>(g.rows.size()), static_cast<Index>(g.atoms.size()));
      for (const auto& [r, a, cf] : g.terms) {
        const auto ri = std::lower_bound(g.rows.begin(), g.rows.end(), r) - g.rows.begin();
        const auto ai = std::lower_bound(g.atoms.begin(), g.atoms.end(), a) - g.atoms.begin();
        g.L(ri, ai) += cf;
      }
      generic.push_back(std::move(g));
    }
    for (const auto& f : P.families) {
      Family fam;
      fam.members = f.members;
      fam.C = f.coef;
      fam.fa = atoms_of[static_cast<std::size_t>(f.members.front())];
      fam.rowmap.resize(fam.fa->count, static_cast<Index>(f.rows.size()));
      for (std::size_t j = 0; j < f.rows.size(); ++j)
        for (int a = 0; a < fam.fa->count; ++a)
          fam.rowmap(a, static_cast<Index>(j)) = f.rows[j][static_cast<std::size_t>(a)];
      families.push_back(std::move(fam));
    }
    for (int l = 0; l < ns; ++l)
      (P.scalars[static_cast<std::size_t>(l)].kind == ScalarKind::kFree ? free_vars : nonneg).push_back(l);
  }

  VectorXd apply(const std::vector<MatrixXd>& X, const VectorXd& x) const {
    VectorXd v = VectorXd::Zero(m);
    for (const auto& g : generic) {
      const VectorXd vals = atom_values(*atoms_of[static_cast<std::size_t>(g.block)], X[static_cast<std::size_t>(g.block)]);
      for (const auto& [r, a, cf] : g.terms) v(r) += cf * vals(a);
    }
    for (const auto& f : families) {
      MatrixXd V(f.fa->count, static_cast<Index>(f.members.size()));
      for (std::size_t i = 0; i < f.members.size(); ++i)
        V.col(static_cast<Index>(i)) = atom_values(*f.fa, X[static_cast<std::size_t>(f.members[i])]);
      const MatrixXd R = V * f.C;
      for (Index j = 0; j < R.cols(); ++j)
        for (Index a = 0; a < R.rows(); ++a)
          if (const int r = f.rowmap(a, j); r >= 0) v(r) += R(a, j);
    }
    for (int l = 0; l < ns; ++l)
      for (const auto& [r, cf] : scalar_cols[static_cast<std::size_t>(l)]) v(r) += cf * x(l);
    return v;
  }

  std::vector<MatrixXd> adjoint_blocks(const VectorXd& y) const {
    std::vector<MatrixXd> S;
    S.reserve(static_cast<std::size_t>(nb));
    for (int k = 0; k < nb; ++k) S.push_back(MatrixXd::Zero(sizes[static_cast<std::size_t>(k)], sizes[static_cast<std::size_t>(k)]));
    for (const auto& g : generic) {
      const auto& fa = *atoms_of[static_cast<std::size_t>(g.block)];
      VectorXd u = VectorXd::Zero(fa.count);
      for (const auto& [r, a, cf] : g.terms) u(a) += cf * y(r);
      add_atom_matrix(fa, u, S[static_cast<std::size_t>(g.block)]);
    }
    for (const auto& f : families) {
      MatrixXd Y = MatrixXd::Zero(f.fa->count, f.C.cols());
      for (Index j = 0; j < Y.cols(); ++j)
        for (Index a = 0; a < Y.rows(); ++a)
          if (const int r = f.rowmap(a, j); r >= 0) Y(a, j) = y(r);
      const MatrixXd U = Y * f.C.transpose();
      for (std::size_t i = 0; i < f.members.size(); ++i)
        add_atom_matrix(*f.fa, U.col(static_cast<Index>(i)), S[static_cast<std::size_t>(f.members[i])]);
    }
    return S;
  }

  VectorXd adjoint_scalars(const VectorXd& y) const {
    VectorXd v = VectorXd::Zero(ns);
    for (int l = 0; l < ns; ++l)
      for (const auto& [r, cf] : scalar_cols[static_cast<std::size_t>(l)]) v(l) += cf * y(r);
    return v;
  }

  // Lower triangle of sum_k A_k (X_k (x) Zi_k) A_k^T + A_l diag(d) A_l^T.
  void schur(const std::vector<MatrixXd>& X, const std::vector<MatrixXd>& Zi, const VectorXd& d, MatrixXd& M) const {
    M.triangularView<Eigen::Lower>().setZero();
    for (const auto& g : generic) {
      const auto& fa = *atoms_of[static_cast<std::size_t>(g.block)];
      MatrixXd K(fa.count, fa.count);
      schur_kernel(fa, X[static_cast<std::size_t>(g.block)], Zi[static_cast<std::size_t>(g.block)], K.data());
      const MatrixXd G = g.L * K(g.atoms, g.atoms) * g.L.transpose();
      for (std::size_t i = 0; i < g.rows.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) M(g.rows[i], g.rows[j]) += G(static_cast<Index>(i), static_cast<Index>(j));
    }
    for (const auto& f : families) family_schur(f, X, Zi, M);
    for (std::size_t t = 0; t < nonneg.size(); ++t) {
      const auto& col = scalar_cols[static_cast<std::size_t>(nonneg[t])];
      for (const auto& [r1, c1] : col)
        for (const auto& [r2, c2] : col)
          if (r1 >= r2) M(r1, r2) += d(static_cast<Index>(t)) * c1 * c2;
    }
  }

  int m = 0, nb = 0, ns = 0;
  std::vector<int> sizes;
  std::vector<const FlatAtoms*> atoms_of;
  std::map<const AtomSet*, FlatAtoms> flats;
  std::vector<GenericBlock> generic;
  std::vector<Family> families;
  std::vector<std::vector<std::pair<int, double>>> scalar_cols;
  std::vector<int> nonneg, free_vars;
  VectorXd b, c;

 private:
  static void family_schur(const Family& f, const std::vector<MatrixXd>& X, const std::vector<MatrixXd>& Zi, MatrixXd& M) {
    const Index na = f.fa->count;
    const Index nm = static_cast<Index>(f.members.size());
    const Index pc = f.C.cols();
    MatrixXd Kmat(na * na, nm);
    for (Index i = 0; i < nm; ++i) {
      const auto k = static_cast<std::size_t>(f.members[static_cast<std::size_t>(i)]);
      schur_kernel(*f.fa, X[k], Zi[k], Kmat.col(i).data());
    }
    std::vector<std::pair<Index, Index>> pairs;
    for (Index j = 0; j < pc; ++j)
      for (Index j2 = j; j2 < pc; ++j2)
        if (f.C.col(j).cwiseProduct(f.C.col(j2)).cwiseAbs().maxCoeff() > 0.0) pairs.emplace_back(j, j2);
    constexpr std::size_t kChunk = 32;
    for (std::size_t start = 0; start < pairs.size(); start += kChunk) {
      const std::size_t cnt = std::min(kChunk, pairs.size() - start);
      MatrixXd Pm(nm, static_cast<Index>(cnt));
      for (std::size_t t = 0; t < cnt; ++t) {
        const auto [j, j2] = pairs[start + t];
        Pm.col(static_cast<Index>(t)) = f.C.col(j).cwiseProduct(f.C.col(j2));
      }
      const MatrixXd Out = Kmat * Pm;
      for (std::size_t t = 0; t < cnt; ++t) {
        const auto [j, j2] = pairs[start + t];
        const double* o = Out.col(static_cast<Index>(t)).data();
        for (Index a = 0; a < na; ++a) {
          const int r = f.rowmap(a, j);
          if (r < 0) continue;
          const Index bmax = j == j2 ? a + 1 : na;
          for (Index bb = 0; bb < bmax; ++bb) {
            const int s = f.rowmap(bb, j2);
            if (s < 0) continue;
            const double v = o[a + bb * na];
            if (r >= s)
              M(r, s) += v;
            else
              M(s, r) += v;
          }
        }
      }
    }
  }
};

double max_step(const MatrixXd& X, const MatrixXd& dX) {
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd T = llt.matrixL().solve(dX);
  T = llt.matrixL().solve(T.transpose()).transpose();
  T = 0.5 * (T + T.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(T, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return lmin < 0.0 ? -1.0 / lmin : kInf;
}

double max_step(const VectorXd& x, const VectorXd& dx) {
  double a = kInf;
  for (Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
  return a;
}

MatrixXd sym(const MatrixXd& A) { return 0.5 * (A + A.transpose()); }

struct Iterate {
  std::vector<MatrixXd> X, Z;
  VectorXd xl, zl, xf, y;
};

struct Direction {
  std::vector<MatrixXd> dX, dZ;
  VectorXd dxl, dzl, dxf, dy;
};

}  // namespace

ConicSolution InteriorPointSolver::solve(const ConicProblem& problem, const SolverOptions& opt) const {
  problem.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Structure S(problem);
  const int m = S.m;
  const int nb = S.nb;
  const Index nl = static_cast<Index>(S.nonneg.size());
  const Index nf = static_cast<Index>(S.free_vars.size());

  VectorXd cl(nl), cf(nf);
  for (Index t = 0; t < nl; ++t) cl(t) = S.c(S.nonneg[static_cast<std::size_t>(t)]);
  for (Index t = 0; t < nf; ++t) cf(t) = S.c(S.free_vars[static_cast<std::size_t>(t)]);
  MatrixXd Af = MatrixXd::Zero(m, nf);
  for (Index t = 0; t < nf; ++t)
    for (const auto& [r, v] : S.scalar_cols[static_cast<std::size_t>(S.free_vars[static_cast<std::size_t>(t)])]) Af(r, t) += v;

  auto assemble_x = [&](const VectorXd& xl, const VectorXd& xf) {
    VectorXd x = VectorXd::Zero(S.ns);
    for (Index t = 0; t < nl; ++t) x(S.nonneg[static_cast<std::size_t>(t)]) = xl(t);
    for (Index t = 0; t < nf; ++t) x(S.free_vars[static_cast<std::size_t>(t)]) = xf(t);
    return x;
  };
  auto split_l = [&](const VectorXd& v) {
    VectorXd o(nl);
    for (Index t = 0; t < nl; ++t) o(t) = v(S.nonneg[static_cast<std::size_t>(t)]);
    return o;
  };
  auto split_f = [&](const VectorXd& v) {
    VectorXd o(nf);
    for (Index t = 0; t < nf; ++t) o(t) = v(S.free_vars[static_cast<std::size_t>(t)]);
    return o;
  };

  double cone_dim = static_cast<double>(nl);
  for (int k = 0; k < nb; ++k) cone_dim += S.sizes[static_cast<std::size_t>(k)];

  const double bnorm = S.b.norm();
  const double cnorm = S.c.norm();
  const double xi = std::max(10.0, std::sqrt(static_cast<double>(problem.max_block_size())));
  const double eta = xi;

  Iterate it;
  for (int k = 0; k < nb; ++k) {
    const int s = S.sizes[static_cast<std::size_t>(k)];
    it.X.push_back(xi * MatrixXd::Identity(s, s));
    it.Z.push_back(eta * MatrixXd::Identity(s, s));
  }
  it.xl = VectorXd::Constant(nl, xi);
  it.zl = VectorXd::Constant(nl, eta);
  it.xf = VectorXd::Zero(nf);
  it.y = VectorXd::Zero(m);

  ConicSolution sol;
  MatrixXd M(m, m);
  std::vector<MatrixXd> Zi(static_cast<std::size_t>(nb));

  auto finish = [&](SolverStatus st, std::string msg) {
    sol.status = st;
    sol.message = std::move(msg);
    sol.X = it.X;
    sol.Z = it.Z;
    sol.scalars = assemble_x(it.xl, it.xf);
    sol.scalar_duals = VectorXd::Zero(S.ns);
    for (Index t = 0; t < nl; ++t) sol.scalar_duals(S.nonneg[static_cast<std::size_t>(t)]) = it.zl(t);
    sol.y = it.y;
    sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
  };

  int stalls = 0;
  Iterate best = it;
  double best_merit = kInf;
  int best_iter = 0;
  double best_progress = kInf;
  int progress_iter = 0;
  std::tuple<double, double, double, double, double> best_metrics{};
  for (int iter = 0;; ++iter) {
    sol.iterations = iter;
    const VectorXd xfull = assemble_x(it.xl, it.xf);
    const VectorXd Rp = S.b - S.apply(it.X, xfull);
    std::vector<MatrixXd> Rd = S.adjoint_blocks(it.y);
    double rd2 = 0.0;
    for (int k = 0; k < nb; ++k) {
      Rd[static_cast<std::size_t>(k)] = -Rd[static_cast<std::size_t>(k)] - it.Z[static_cast<std::size_t>(k)];
      rd2 += Rd[static_cast<std::size_t>(k)].squaredNorm();
    }
    const VectorXd aty = S.adjoint_scalars(it.y);
    const VectorXd rdl = cl - split_l(aty) - it.zl;
    const VectorXd rf = cf - split_f(aty);

    double comp = it.xl.dot(it.zl);
    for (int k = 0; k < nb; ++k) comp += it.X[static_cast<std::size_t>(k)].cwiseProduct(it.Z[static_cast<std::size_t>(k)]).sum();
    const double mu = comp / std::max(1.0, cone_dim);
    const double pobj = S.c.dot(xfull);
    const double dobj = S.b.dot(it.y);
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.primal_infeasibility = Rp.norm() / (1.0 + bnorm);
    sol.dual_infeasibility = std::sqrt(rd2 + rdl.squaredNorm() + rf.squaredNorm()) / (1.0 + cnorm);
    sol.relative_gap = std::max(std::abs(pobj - dobj), comp) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (opt.verbose)
      std::cerr << "ipm " << iter << " pobj " << pobj << " dobj " << dobj << " pinf " << sol.primal_infeasibility
                << " dinf " << sol.dual_infeasibility << " gap " << sol.relative_gap << " mu " << mu << "\n";

    if (sol.primal_infeasibility < opt.tol_feas && sol.dual_infeasibility < opt.tol_feas &&
        sol.relative_gap < opt.tol_gap)
      return finish(SolverStatus::kOptimal, "converged");
    if (dobj > 0.0) {
      const double ray = std::sqrt(rd2 + (rdl - cl).squaredNorm() + (cf - rf).squaredNorm()) / dobj;
      if (ray < opt.tol_infeas) return finish(SolverStatus::kPrimalInfeasible, "dual ray certifies primal infeasibility");
    }
    if (pobj < 0.0) {
      const double ray = (S.b - Rp).norm() / -pobj;
      if (ray < opt.tol_infeas) return finish(SolverStatus::kDualInfeasible, "primal ray certifies dual infeasibility");
    }
    const double merit = std::max({sol.primal_infeasibility, sol.dual_infeasibility, sol.relative_gap});
    if (merit < 0.5 * best_merit) {
      best_merit = merit;
      best = it;
      best_iter = iter;
      best_metrics = {pobj, dobj, sol.primal_infeasibility, sol.dual_infeasibility, sol.relative_gap};
    }
    // Stalling is judged on unnormalized residuals and mu; the relative gap can
    // grow while the dual objective shrinks toward zero.
    const double progress = std::max({sol.primal_infeasibility, sol.dual_infeasibility, mu});
    if (progress < 0.5 * best_progress) {
      best_progress = progress;
      progress_iter = iter;
    }
    if (iter >= opt.max_iter || (iter - best_iter >= 10 && iter - progress_iter >= 10)) {
      // Return the most accurate iterate seen; accept it when it is close to tolerance.
      it = best;
      std::tie(sol.primal_objective, sol.dual_objective, sol.primal_infeasibility, sol.dual_infeasibility,
               sol.relative_gap) = best_metrics;
      const bool near = best_merit < 1e3 * std::max(opt.tol_feas, opt.tol_gap);
      if (near) return finish(SolverStatus::kOptimal, "progress stalled; converged to reduced accuracy");
      return finish(iter >= opt.max_iter ? SolverStatus::kIterationLimit : SolverStatus::kNumericalError,
                    iter >= opt.max_iter ? "iteration limit reached" : "lack of progress");
    }

    for (int k = 0; k < nb; ++k) {
      Eigen::LLT<MatrixXd> llt(it.Z[static_cast<std::size_t>(k)]);
      if (llt.info() != Eigen::Success) return finish(SolverStatus::kNumericalError, "dual slack lost definiteness");
      Zi[static_cast<std::size_t>(k)] = llt.solve(MatrixXd::Identity(S.sizes[static_cast<std::size_t>(k)], S.sizes[static_cast<std::size_t>(k)]));
    }
    const VectorXd D = it.xl.cwiseQuotient(it.zl);

    // Factor the Schur complement, adding a ridge if it is numerically singular.
    double ridge = 0.0;
    std::unique_ptr<Eigen::LLT<Eigen::Ref<MatrixXd>>> llt;
    for (int attempt = 0;; ++attempt) {
      S.schur(it.X, Zi, D, M);
      double dmax = 0.0;
      for (int r = 0; r < m; ++r) dmax = std::max(dmax, M(r, r));
      if (dmax <= 0.0) dmax = 1.0;
      for (int r = 0; r < m; ++r) M(r, r) = std::max(M(r, r), 1e-14 * dmax) + ridge * dmax;
      llt = std::make_unique<Eigen::LLT<Eigen::Ref<MatrixXd>>>(M);
      if (llt->info() == Eigen::Success) break;
      if (attempt >= 4) return finish(SolverStatus::kNumericalError, "Schur complement not positive definite");
      ridge = ridge == 0.0 ? 1e-13 : ridge * 100.0;
    }

    MatrixXd MiAf;
    Eigen::ColPivHouseholderQR<MatrixXd> saddle;
    if (nf > 0) {
      MiAf = llt->solve(Af);
      saddle.compute(Af.transpose() * MiAf);
    }

    auto solve_saddle = [&](const VectorXd& r1, const VectorXd& r2, VectorXd& dy, VectorXd& dxf) {
      const VectorXd Mr = llt->solve(r1);
      if (nf > 0) {
        dxf = saddle.solve(Af.transpose() * Mr - r2);
        dy = Mr - MiAf * dxf;
      } else {
        dxf = VectorXd::Zero(0);
        dy = Mr;
      }
    };
    // Matrix-free product with the Schur complement, used for refinement.
    auto schur_times = [&](const VectorXd& v) {
      std::vector<MatrixXd> T = S.adjoint_blocks(v);
      for (int k = 0; k < nb; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        T[ks] = it.X[ks] * T[ks] * Zi[ks];
      }
      const VectorXd xs = D.cwiseProduct(split_l(S.adjoint_scalars(v)));
      return VectorXd(S.apply(T, assemble_x(xs, VectorXd::Zero(nf))));
    };
    auto solve_newton = [&](const VectorXd& r1, const VectorXd& r2, VectorXd& dy, VectorXd& dxf) {
      solve_saddle(r1, r2, dy, dxf);
      for (int round = 0; round < 2; ++round) {
        const VectorXd e1 = r1 - schur_times(dy) - Af * dxf;
        const VectorXd e2 = r2 - Af.transpose() * dy;
        VectorXd cy, cx;
        solve_saddle(e1, e2, cy, cx);
        dy += cy;
        dxf += cx;
      }
    };

    // H is sigma*mu*I - dX_aff dZ_aff per block; h the LP analogue.
    auto direction = [&](double sigma_mu, const Direction* aff) {
      std::vector<MatrixXd> W(static_cast<std::size_t>(nb));
      for (int k = 0; k < nb; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const int s = S.sizes[ks];
        MatrixXd H = sigma_mu * MatrixXd::Identity(s, s);
        if (aff) H -= aff->dX[ks] * aff->dZ[ks];
        W[ks] = H * Zi[ks] - it.X[ks] - it.X[ks] * Rd[ks] * Zi[ks];
      }
      VectorXd h = VectorXd::Constant(nl, sigma_mu);
      if (aff) h -= aff->dxl.cwiseProduct(aff->dzl);
      const VectorXd wl = h.cwiseQuotient(it.zl) - it.xl - D.cwiseProduct(rdl);
      const VectorXd rhs = Rp - S.apply(W, assemble_x(wl, VectorXd::Zero(nf)));
      Direction d;
      solve_newton(rhs, rf, d.dy, d.dxf);
      std::vector<MatrixXd> atdy = S.adjoint_blocks(d.dy);
      d.dZ.resize(static_cast<std::size_t>(nb));
      d.dX.resize(static_cast<std::size_t>(nb));
      for (int k = 0; k < nb; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const int s = S.sizes[ks];
        MatrixXd H = sigma_mu * MatrixXd::Identity(s, s);
        if (aff) H -= aff->dX[ks] * aff->dZ[ks];
        d.dZ[ks] = sym(Rd[ks] - atdy[ks]);
        d.dX[ks] = sym(H * Zi[ks] - it.X[ks] - it.X[ks] * d.dZ[ks] * Zi[ks]);
      }
      d.dzl = rdl - split_l(S.adjoint_scalars(d.dy));
      d.dxl = h.cwiseQuotient(it.zl) - it.xl - D.cwiseProduct(d.dzl);
      return d;
    };

    auto steps = [&](const Direction& d) {
      double ap = max_step(it.xl, d.dxl);
      double ad = max_step(it.zl, d.dzl);
      for (int k = 0; k < nb; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        ap = std::min(ap, max_step(it.X[ks], d.dX[ks]));
        ad = std::min(ad, max_step(it.Z[ks], d.dZ[ks]));
      }
      return std::pair{ap, ad};
    };

    const Direction aff = direction(0.0, nullptr);
    const auto [ap_aff, ad_aff] = steps(aff);
    const double pa = std::min(1.0, ap_aff);
    const double da = std::min(1.0, ad_aff);
    double comp_aff = (it.xl + pa * aff.dxl).dot(it.zl + da * aff.dzl);
    for (int k = 0; k < nb; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      comp_aff += (it.X[ks] + pa * aff.dX[ks]).cwiseProduct(it.Z[ks] + da * aff.dZ[ks]).sum();
    }
    const double ratio = std::clamp(comp_aff / std::max(comp, 1e-300), 0.0, 1.0);
    const double expo = std::max(1.0, 3.0 * std::min(pa, da) * std::min(pa, da));
    const double sigma = std::pow(ratio, expo);

    const Direction d = direction(sigma * mu, &aff);
    const auto [ap_max, ad_max] = steps(d);
    const double gamma = 0.9 + 0.09 * std::min(pa, da);
    const double ap = std::min(1.0, gamma * ap_max);
    const double ad = std::min(1.0, gamma * ad_max);
    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalls >= 3) return finish(SolverStatus::kNumericalError, "step length collapsed");
    } else {
      stalls = 0;
    }

    for (int k = 0; k < nb; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      it.X[ks] = sym(it.X[ks] + ap * d.dX[ks]);
      it.Z[ks] = sym(it.Z[ks] + ad * d.dZ[ks]);
    }
    it.xl += ap * d.dxl;
    it.xf += ap * d.dxf;
    it.zl += ad * d.dzl;
    it.y += ad * d.dy;
  }
}

}  // namespace ddsafe::sdp
