#include "ddsafe/consistency/polytope.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <numeric>
#include <ostream>
#include <thread>

#include "ddsafe/error.hpp"
#include "ddsafe/format.hpp"

namespace ddsafe::consistency {
namespace {

std::string point_text(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + format_double(x[i]);
  return s + ")";
}

}  // namespace

ConsistencyPolytope ConsistencyPolytope::select_rows(const std::vector<int>& rows) const {
  ConsistencyPolytope out;
  out.N.resize(static_cast<Eigen::Index>(rows.size()), N.cols());
  out.e.resize(static_cast<Eigen::Index>(rows.size()));
  out.f = f;
  out.g = g;
  out.w = w;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.N.row(static_cast<Eigen::Index>(k)) = N.row(rows[k]);
    out.e(static_cast<Eigen::Index>(k)) = e(rows[k]);
    if (!tags.empty()) out.tags.push_back(tags[static_cast<std::size_t>(rows[k])]);
  }
  return out;
}

DataBlocks assemble_data_blocks(const Dataset& data, const model::Dictionary& dict) {
  data.validate();
  if (data.samples.empty()) throw StructuralError("dataset is empty");
  if (data.n != dict.n) throw StructuralError("dataset and dictionary dimensions differ");
  const Eigen::Index n = data.n;
  const Eigen::Index T = static_cast<Eigen::Index>(data.size());
  const Eigen::Index df = static_cast<Eigen::Index>(dict.d_f());
  const Eigen::Index dg = static_cast<Eigen::Index>(dict.d_g());
  DataBlocks out{Eigen::MatrixXd::Zero(n * T, n * df), Eigen::MatrixXd::Zero(n * T, n * dg),
                 Eigen::VectorXd(n * T)};
  for (Eigen::Index s = 0; s < T; ++s) {
    const auto& smp = data.samples[static_cast<std::size_t>(s)];
    const std::vector<double> x(smp.x.data(), smp.x.data() + n);
    const Eigen::VectorXd phi = dict.phi.evaluate(x);
    const Eigen::VectorXd gam = dict.gamma.evaluate(x);
    for (Eigen::Index i = 0; i < n; ++i) {
      out.A.block(s * n + i, i * df, 1, df) = phi.transpose();
      out.B.block(s * n + i, i * dg, 1, dg) = smp.u * gam.transpose();
    }
    out.xi.segment(s * n, n) = smp.y;
  }
  return out;
}

ConsistencyPolytope assemble_P1(const Dataset& data, const model::Dictionary& dict,
                                const model::DisturbanceSet& W) {
  if (W.dimension() != data.n) throw StructuralError("disturbance set dimension differs from n");
  const DataBlocks blocks = assemble_data_blocks(data, dict);
  const Eigen::Index nT = blocks.A.rows();
  const Eigen::Index cf = blocks.A.cols();
  const Eigen::Index cg = blocks.B.cols();
  const Eigen::Index cw = W.dimension();
  const Eigen::Index rw = W.W().rows();
  ConsistencyPolytope P;
  P.N = Eigen::MatrixXd::Zero(2 * nT + rw, cf + cg + cw);
  P.e.resize(2 * nT + rw);
  P.N.block(0, 0, nT, cf) = blocks.A;
  P.N.block(0, cf, nT, cg) = blocks.B;
  P.N.block(nT, 0, nT, cf) = -blocks.A;
  P.N.block(nT, cf, nT, cg) = -blocks.B;
  P.N.block(2 * nT, cf + cg, rw, cw) = W.W();
  P.e.head(nT) = Eigen::VectorXd::Constant(nT, data.epsilon) + blocks.xi;
  P.e.segment(nT, nT) = Eigen::VectorXd::Constant(nT, data.epsilon) - blocks.xi;
  P.e.tail(rw) = W.d_w();
  P.f = {0, cf};
  P.g = {cf, cf + cg};
  P.w = {cf + cg, cf + cg + cw};
  const int n = data.n;
  for (FaceKind kind : {FaceKind::kDataUpper, FaceKind::kDataLower}) {
    for (Eigen::Index r = 0; r < nT; ++r) {
      P.tags.push_back({kind, static_cast<int>(r / n), static_cast<int>(r % n)});
    }
  }
  for (Eigen::Index r = 0; r < rw; ++r) {
    P.tags.push_back({FaceKind::kDisturbance, -1, static_cast<int>(r)});
  }
  return P;
}

MembershipResult membership(const ConsistencyPolytope& P, const Eigen::VectorXd& theta,
                            double tol) {
  if (theta.size() != P.columns()) throw StructuralError("theta length does not match columns");
  MembershipResult r;
  r.max_violation = P.rows() ? (P.N * theta - P.e).maxCoeff() : -std::numeric_limits<double>::infinity();
  r.member = r.max_violation <= tol;
  return r;
}

std::optional<std::pair<Eigen::VectorXd, double>> chebyshev_center(const ConsistencyPolytope& P) {
  const Eigen::Index m = P.rows();
  const Eigen::Index c = P.columns();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, c + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
  A.topLeftCorner(m, c) = P.N;
  A.col(c).head(m) = P.N.rowwise().norm();
  b.head(m) = P.e;
  A(m, c) = -1.0;
  const auto res = lp::maximize(A, b, Eigen::VectorXd::Unit(c + 1, c));
  if (res.status == lp::Status::kInfeasible) {
    throw InconsistentDataError("data and priors are inconsistent: the consistency polytope is empty");
  }
  if (res.status == lp::Status::kUnbounded) return std::nullopt;
  if (res.status != lp::Status::kOptimal) {
    throw NumericalError("Chebyshev center LP failed: " + lp::to_string(res.status));
  }
  return std::make_pair(Eigen::VectorXd(res.x.head(c)), res.x(c));
}

FaceReduction reduce_faces(const ConsistencyPolytope& P, double tol_red) {
  const Eigen::Index m = P.rows();
  Eigen::VectorXd anchor;
  if (auto cc = chebyshev_center(P)) {
    anchor = cc->first;
  } else {
    auto fp = lp::feasible_point(P.N, P.e);
    if (!fp) throw InconsistentDataError("data and priors are inconsistent: the consistency polytope is empty");
    anchor = *fp;
  }
  const Eigen::VectorXd slack = P.e - P.N * anchor;
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return slack(a) > slack(b); });

  std::vector<char> keep(static_cast<std::size_t>(m), 1);
  FaceReduction out;
  for (int i : order) {
    std::vector<int> support;
    for (int k = 0; k < m; ++k) {
      if (k != i && keep[static_cast<std::size_t>(k)]) support.push_back(k);
    }
    Eigen::MatrixXd A(static_cast<Eigen::Index>(support.size()), P.columns());
    Eigen::VectorXd b(static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) {
      A.row(static_cast<Eigen::Index>(k)) = P.N.row(support[k]);
      b(static_cast<Eigen::Index>(k)) = P.e(support[k]);
    }
    const auto res = lp::maximize(A, b, P.N.row(i).transpose());
    // Unbounded or failed test LPs cannot certify redundancy: keep the row.
    if (res.status != lp::Status::kOptimal || res.objective > P.e(i) + tol_red) continue;
    keep[static_cast<std::size_t>(i)] = 0;
    out.removed.push_back({i, std::move(support), res.multipliers, res.objective});
  }
  for (int k = 0; k < m; ++k) {
    if (keep[static_cast<std::size_t>(k)]) out.kept.push_back(k);
  }
  out.polytope = P.select_rows(out.kept);
  return out;
}

bool verify_redundancy_certificate(const ConsistencyPolytope& original,
                                   const RedundancyCertificate& cert, double tol_red) {
  const auto& y = cert.multipliers;
  if (static_cast<std::size_t>(y.size()) != cert.support.size()) return false;
  if (y.size() && y.minCoeff() < -1e-12) return false;
  Eigen::VectorXd combo = Eigen::VectorXd::Zero(original.columns());
  double bound = 0.0;
  for (std::size_t k = 0; k < cert.support.size(); ++k) {
    combo += y(static_cast<Eigen::Index>(k)) * original.N.row(cert.support[k]).transpose();
    bound += y(static_cast<Eigen::Index>(k)) * original.e(cert.support[k]);
  }
  const Eigen::VectorXd target = original.N.row(cert.row).transpose();
  const double scale = std::max(1.0, target.lpNorm<Eigen::Infinity>());
  return (combo - target).lpNorm<Eigen::Infinity>() <= 1e-8 * scale &&
         bound <= original.e(cert.row) + tol_red + 1e-9 * std::max(1.0, std::abs(bound));
}

bool compactness_check(const ConsistencyPolytope& P) {
  if (!lp::feasible_point(P.N, P.e)) {
    throw InconsistentDataError("data and priors are inconsistent: the consistency polytope is empty");
  }
  for (Eigen::Index i = 0; i < P.columns(); ++i) {
    for (double sgn : {1.0, -1.0}) {
      const auto r = lp::maximize(P.N, P.e, sgn * Eigen::VectorXd::Unit(P.columns(), i));
      if (r.status == lp::Status::kUnbounded) return false;
      if (r.status != lp::Status::kOptimal) {
        throw NumericalError("boundedness LP failed on column " + std::to_string(i) + ": " +
                             lp::to_string(r.status));
      }
    }
  }
  return true;
}

ContainmentOracle::ContainmentOracle(ConsistencyPolytope P, poly::Polynomial rho,
                                     const poly::Polynomial& psi, poly::Polynomial h,
                                     const model::Dictionary& dict)
    : P_(std::move(P)), rho_(std::move(rho)), h_(std::move(h)),
      r_(poly::build_r(rho_, psi, dict.phi, dict.gamma, dict.n)) {
  if (static_cast<Eigen::Index>(r_.size()) != P_.columns()) {
    throw StructuralError("polytope columns do not match the dictionary layout");
  }
}

OracleResult ContainmentOracle::evaluate(std::span<const double> x) const {
  const Eigen::VectorXd rv = r_.evaluate(x);
  const auto res = lp::maximize(P_.N, P_.e, rv);
  if (res.status != lp::Status::kOptimal) {
    throw NumericalError("containment LP at x = " + point_text(x) + " ended " +
                         lp::to_string(res.status));
  }
  OracleResult out;
  out.lp_max = res.objective;
  out.margin = -rho_.evaluate(x) * h_.evaluate(x) - res.objective;
  out.maximizer = res.x;
  return out;
}

std::vector<OracleResult> ContainmentOracle::sweep(const std::vector<std::vector<double>>& points,
                                                   unsigned threads) const {
  std::vector<OracleResult> out(points.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, points.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < points.size();) {
      try {
        out[k] = evaluate(points[k]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

OracleResult containment_lp_oracle(const ConsistencyPolytope& P, const poly::Polynomial& rho,
                                   const poly::Polynomial& psi, const poly::Polynomial& h,
                                   const model::Dictionary& dict, std::span<const double> x) {
  return ContainmentOracle(P, rho, psi, h, dict).evaluate(x);
}

void write_polytope_dump(std::ostream& out, const ConsistencyPolytope& P) {
  out << "%%ddsafe-polytope coordinate real general\n";
  out << "% blocks (0-based column ranges [begin, end))\n";
  out << "% f " << P.f.begin << ' ' << P.f.end << '\n';
  out << "% g " << P.g.begin << ' ' << P.g.end << '\n';
  out << "% w " << P.w.begin << ' ' << P.w.end << '\n';
  std::size_t nnz = 0;
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    for (Eigen::Index j = 0; j < P.columns(); ++j) nnz += P.N(i, j) != 0.0;
  }
  out << P.rows() << ' ' << P.columns() << ' ' << nnz << '\n';
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    for (Eigen::Index j = 0; j < P.columns(); ++j) {
      if (P.N(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << format_double(P.N(i, j)) << '\n';
    }
  }
  out << "% e\n";
  for (Eigen::Index i = 0; i < P.e.size(); ++i) out << format_double(P.e(i)) << '\n';
}

}  // namespace ddsafe::consistency
