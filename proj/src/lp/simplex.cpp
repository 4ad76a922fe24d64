#include "ddsafe/lp/simplex.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <vector>

namespace ddsafe::lp {

std::string to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

// min cost.y  s.t.  E y = rhs (rhs >= 0), y >= 0, with one artificial column
// per row appended implicitly.
class DualSimplex {
 public:
  DualSimplex(Eigen::MatrixXd E, Eigen::VectorXd rhs, Eigen::VectorXd cost, const Options& opt)
      : E_(std::move(E)), rhs_(std::move(rhs)), cost_(std::move(cost)), opt_(opt),
        m_(E_.rows()), n_(E_.cols()) {
    basis_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
    cost_scale_ = std::max(1.0, cost_.size() ? cost_.cwiseAbs().maxCoeff() : 0.0);
    rhs_scale_ = std::max(1.0, rhs_.size() ? rhs_.cwiseAbs().maxCoeff() : 0.0);
  }

  // Returns kOptimal, kInfeasible (E y = rhs has no y >= 0), kUnbounded, or
  // kIterationLimit.
  Status run() {
    if (m_ == 0) {
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (cost_(j) < -opt_.optimality_tol * cost_scale_) return Status::kUnbounded;
      }
      return Status::kOptimal;
    }
    Status s = iterate(/*phase_one=*/true);
    if (s != Status::kOptimal) return s;
    if (phase_one_objective() > opt_.feasibility_tol * rhs_scale_ * std::max<double>(1.0, m_)) {
      return Status::kInfeasible;
    }
    drive_out_artificials();
    return iterate(/*phase_one=*/false);
  }

  // Final basis quantities.
  Eigen::VectorXd primal() const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) y(j) = std::max(0.0, xB_(i));
    }
    return y;
  }
  const Eigen::VectorXd& lambda() const { return lambda_; }
  int iterations() const { return iterations_; }

 private:
  double cost_of(Eigen::Index j, bool phase_one) const {
    if (phase_one) return j >= n_ ? 1.0 : 0.0;
    return j >= n_ ? 0.0 : cost_(j);
  }

  Eigen::VectorXd column(Eigen::Index j) const {
    if (j < n_) return E_.col(j);
    return Eigen::VectorXd::Unit(m_, j - n_);
  }

  void factor(bool phase_one) {
    Eigen::MatrixXd B(m_, m_);
    Eigen::VectorXd cB(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
      B.col(i) = column(j);
      cB(i) = cost_of(j, phase_one);
    }
    lu_.compute(B);
    xB_ = lu_.solve(rhs_);
    lambda_ = lu_.transpose().solve(cB);
  }

  double phase_one_objective() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] >= n_) s += std::max(0.0, xB_(i));
    }
    return s;
  }

  Status iterate(bool phase_one) {
    std::vector<char> in_basis(static_cast<std::size_t>(n_ + m_), 0);
    for (auto j : basis_) in_basis[static_cast<std::size_t>(j)] = 1;
    int degenerate_streak = 0;
    const double scale = phase_one ? 1.0 : cost_scale_;
    while (true) {
      if (iterations_ >= opt_.max_iterations) return Status::kIterationLimit;
      factor(phase_one);
      const bool bland = degenerate_streak > 30;

      // Pricing over original columns; artificials may re-enter only in phase one.
      Eigen::VectorXd d = Eigen::VectorXd::Zero(n_);
      if (phase_one) {
        d.noalias() = -(E_.transpose() * lambda_);
      } else {
        d.noalias() = cost_ - E_.transpose() * lambda_;
      }
      Eigen::Index q = -1;
      double best = -opt_.optimality_tol * scale;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        const double dj = d(j) / std::max(1.0, E_.col(j).lpNorm<Eigen::Infinity>());
        if (dj < best) {
          best = dj;
          q = j;
          if (bland) break;
        }
      }
      if (q < 0) return Status::kOptimal;

      const Eigen::VectorXd u = lu_.solve(E_.col(q));
      const double piv_tol = opt_.pivot_tol * std::max(1.0, u.lpNorm<Eigen::Infinity>());
      Eigen::Index r = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const Eigen::Index bi = basis_[static_cast<std::size_t>(i)];
        // A zero-level artificial in phase two must not grow: any nonzero
        // pivot on it blocks immediately.
        if (!phase_one && bi >= n_) {
          if (std::abs(u(i)) > piv_tol) {
            if (r < 0 || ratio > 0.0 || (bland && bi < basis_[static_cast<std::size_t>(r)])) {
              ratio = 0.0;
              r = i;
            }
          }
          continue;
        }
        if (u(i) <= piv_tol) continue;
        const double t = std::max(0.0, xB_(i)) / u(i);
        const bool better = r < 0 || t < ratio - 1e-12 * std::max(1.0, ratio);
        const bool tie = !better && t <= ratio + 1e-12 * std::max(1.0, ratio);
        if (better || (tie && r >= 0 &&
                       (bland ? bi < basis_[static_cast<std::size_t>(r)]
                              : std::abs(u(i)) > std::abs(u(r))))) {
          ratio = t;
          r = i;
        }
      }
      if (r < 0) return Status::kUnbounded;
      degenerate_streak = ratio <= 1e-14 ? degenerate_streak + 1 : 0;
      in_basis[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = 0;
      in_basis[static_cast<std::size_t>(q)] = 1;
      basis_[static_cast<std::size_t>(r)] = q;
      ++iterations_;
    }
  }

  void drive_out_artificials() {
    factor(true);
    std::vector<char> in_basis(static_cast<std::size_t>(n_ + m_), 0);
    for (auto j : basis_) in_basis[static_cast<std::size_t>(j)] = 1;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      // Row i of B^{-1} E tells which original column can replace it.
      const Eigen::VectorXd row = lu_.transpose().solve(Eigen::VectorXd::Unit(m_, i));
      const Eigen::VectorXd coeffs = E_.transpose() * row;
      Eigen::Index q = -1;
      double best = 1e-9;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (in_basis[static_cast<std::size_t>(j)]) continue;
        const double v = std::abs(coeffs(j)) / std::max(1.0, E_.col(j).lpNorm<Eigen::Infinity>());
        if (v > best) {
          best = v;
          q = j;
        }
      }
      if (q < 0) continue;  // redundant row; the artificial stays at zero
      in_basis[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = 0;
      in_basis[static_cast<std::size_t>(q)] = 1;
      basis_[static_cast<std::size_t>(i)] = q;
      factor(true);
    }
  }

  Eigen::MatrixXd E_;
  Eigen::VectorXd rhs_;
  Eigen::VectorXd cost_;
  Options opt_;
  Eigen::Index m_;
  Eigen::Index n_;
  double cost_scale_ = 1.0;
  double rhs_scale_ = 1.0;
  std::vector<Eigen::Index> basis_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  Eigen::VectorXd xB_;
  Eigen::VectorXd lambda_;
  int iterations_ = 0;
};

}  // namespace

Result maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                const Options& options) {
  // Dual standard form: min b.y  s.t.  A^T y = c, y >= 0.
  Eigen::MatrixXd E = A.transpose();
  Eigen::VectorXd rhs = c;
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(c.size());
  for (Eigen::Index i = 0; i < rhs.size(); ++i) {
    if (rhs(i) < 0.0) {
      sign(i) = -1.0;
      rhs(i) = -rhs(i);
      E.row(i) *= -1.0;
    }
  }
  DualSimplex solver(std::move(E), std::move(rhs), b, options);
  const Status s = solver.run();
  Result out;
  out.iterations = solver.iterations();
  switch (s) {
    case Status::kOptimal: {
      out.status = Status::kOptimal;
      out.multipliers = solver.primal();
      out.x = sign.cwiseProduct(solver.lambda());
      out.objective = c.dot(out.x);
      break;
    }
    case Status::kInfeasible:
      // No multipliers: the primal is unbounded or infeasible. A feasibility
      // probe tells which.
      out.status = feasible_point(A, b, options) ? Status::kUnbounded : Status::kInfeasible;
      break;
    case Status::kUnbounded:
      // Dual unbounded below: the primal is infeasible.
      out.status = Status::kInfeasible;
      break;
    case Status::kIterationLimit:
      out.status = Status::kIterationLimit;
      break;
  }
  return out;
}

std::optional<Eigen::VectorXd> feasible_point(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                              const Options& options) {
  DualSimplex solver(A.transpose(), Eigen::VectorXd::Zero(A.cols()), b, options);
  if (solver.run() != Status::kOptimal) return std::nullopt;
  Eigen::VectorXd x = solver.lambda();
  const double tol = 1e-7 * std::max(1.0, b.size() ? b.cwiseAbs().maxCoeff() : 0.0);
  if (A.rows() > 0 && (A * x - b).maxCoeff() > tol) return std::nullopt;
  return x;
}

}  // namespace ddsafe::lp
