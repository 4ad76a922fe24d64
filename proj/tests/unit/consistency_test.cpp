#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "ddsafe/consistency/polytope.hpp"
#include "ddsafe/error.hpp"
#include "ddsafe/model/system.hpp"
#include "ddsafe/poly/parser.hpp"
#include "ddsafe/sim/data.hpp"

using namespace ddsafe;
using namespace ddsafe::consistency;

namespace {

poly::Polynomial P1d(const char* text) {
  return poly::parse_polynomial(text, poly::default_variable_names(1));
}

model::Dictionary toy_dictionary() {
  return model::make_dictionary(1, poly::PolyVector(1, {P1d("x1")}), poly::PolyVector(1, {P1d("1")}));
}

Dataset flow_data(std::uint64_t seed = 1) {
  return sim::generate_dataset(model::flow_system(), 80, 2.0, model::Box{{-2.0, -4.0}, {2.0, 2.0}},
                               {}, seed);
}

// Direct evaluation of F phi(x_s) + G gamma(x_s) u_s, stacked over samples.
Eigen::VectorXd stacked_predictions(const Dataset& data, const model::Dictionary& dict,
                                    const Eigen::MatrixXd& F, const Eigen::MatrixXd& G) {
  Eigen::VectorXd out(data.n * static_cast<Eigen::Index>(data.size()));
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto& smp = data.samples[s];
    const std::vector<double> x(smp.x.data(), smp.x.data() + data.n);
    out.segment(static_cast<Eigen::Index>(s) * data.n, data.n) =
        F * dict.phi.evaluate(x) + smp.u * (G * dict.gamma.evaluate(x));
  }
  return out;
}

Eigen::VectorXd vec_transpose(const Eigen::MatrixXd& M) {
  Eigen::VectorXd v(M.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) v(k++) = M(i, j);
  }
  return v;
}

ConsistencyPolytope raw_polytope(Eigen::MatrixXd N, Eigen::VectorXd e) {
  ConsistencyPolytope P;
  P.N = std::move(N);
  P.e = std::move(e);
  P.f = {0, P.N.cols()};
  return P;
}

}  // namespace

TEST(DataBlocks, ScalarToy) {
  Dataset d{1, 0.0, {{Eigen::VectorXd::Constant(1, 2.0), 3.0, Eigen::VectorXd::Constant(1, 5.0)}}};
  const auto b = assemble_data_blocks(d, toy_dictionary());
  ASSERT_EQ(b.A.rows(), 1);
  EXPECT_EQ(b.A(0, 0), 2.0);
  EXPECT_EQ(b.B(0, 0), 3.0);
  EXPECT_EQ(b.xi(0), 5.0);
}

TEST(DataBlocks, FlowShapes) {
  const auto b = assemble_data_blocks(flow_data(), model::default_dictionary(2, 3, true));
  EXPECT_EQ(b.A.rows(), 160);
  EXPECT_EQ(b.A.cols(), 18);
  EXPECT_EQ(b.B.rows(), 160);
  EXPECT_EQ(b.B.cols(), 2);
}

TEST(DataBlocks, ZeroDictionaryValuesGiveZeroRows) {
  Dataset d{1, 0.0, {{Eigen::VectorXd::Zero(1), 1.0, Eigen::VectorXd::Zero(1)}}};
  const auto b = assemble_data_blocks(d, toy_dictionary());
  EXPECT_EQ(b.A.row(0).cwiseAbs().sum(), 0.0);
}

TEST(DataBlocks, KroneckerStackingIdentity) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 3;
    const auto dict = model::default_dictionary(n, 1 + trial % 3, trial % 2 == 0,
                                                trial % 4 == 0 ? std::optional<int>(1) : std::nullopt);
    Dataset data{n, 0.1, {}};
    for (int s = 0; s < 7; ++s) {
      Eigen::VectorXd x(n);
      for (int i = 0; i < n; ++i) x(i) = 2.0 * g(rng);
      data.samples.push_back({x, g(rng), Eigen::VectorXd::Zero(n)});
    }
    Eigen::MatrixXd F(n, static_cast<Eigen::Index>(dict.d_f()));
    Eigen::MatrixXd G(n, static_cast<Eigen::Index>(dict.d_g()));
    for (auto* M : {&F, &G}) {
      for (Eigen::Index k = 0; k < M->size(); ++k) M->data()[k] = g(rng);
    }
    const auto b = assemble_data_blocks(data, dict);
    const Eigen::VectorXd lhs = b.A * vec_transpose(F) + b.B * vec_transpose(G);
    const Eigen::VectorXd rhs = stacked_predictions(data, dict, F, G);
    EXPECT_LE((lhs - rhs).lpNorm<Eigen::Infinity>(), 1e-10 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()));
  }
}

TEST(AssembleP1, FlowStructure) {
  const auto P = assemble_P1(flow_data(), model::default_dictionary(2, 3, true),
                             model::DisturbanceSet::linf_box(2, 2.0));
  EXPECT_EQ(P.columns(), 22);
  EXPECT_EQ(P.rows(), 324);
  EXPECT_EQ(P.f.size(), 18);
  EXPECT_EQ(P.g.size(), 2);
  EXPECT_EQ(P.w.size(), 2);
  // Disturbance rows have zero plant columns; data rows have zero w columns.
  EXPECT_EQ(P.N.bottomRows(4).leftCols(20).cwiseAbs().sum(), 0.0);
  EXPECT_EQ(P.N.topRows(320).rightCols(2).cwiseAbs().sum(), 0.0);
}

TEST(AssembleP1, ScalarToyAndDegenerateBox) {
  Dataset d{1, 0.5, {{Eigen::VectorXd::Constant(1, 2.0), 3.0, Eigen::VectorXd::Constant(1, 5.0)}}};
  const auto P = assemble_P1(d, toy_dictionary(), model::DisturbanceSet::linf_box(1, 0.0));
  EXPECT_EQ(P.columns(), 3);
  EXPECT_EQ(P.rows(), 4);  // 2nT + 2n with n = T = 1
  EXPECT_EQ(P.N(2, 2), 1.0);
  EXPECT_EQ(P.N(3, 2), -1.0);
  EXPECT_EQ(P.e(2), 0.0);
  EXPECT_EQ(P.e(3), 0.0);
}

TEST(Membership, GroundTruthIsMemberForByConstructionData) {
  const auto flow = model::flow_system();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto data = flow_data(seed);
    EXPECT_LE(sim::max_residual(flow, data), 2.0);
    const auto P = assemble_P1(data, flow.dict, model::DisturbanceSet::linf_box(2, 2.0));
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(P.columns());
    theta.head(20) = model::stacked_parameters(flow);
    const auto m = membership(P, theta);
    EXPECT_TRUE(m.member) << "seed " << seed << " violation " << m.max_violation;
  }
}

TEST(Membership, ZeroThetaFailsWhenResidualExceedsEpsilon) {
  Dataset d{1, 0.5, {{Eigen::VectorXd::Constant(1, 2.0), 3.0, Eigen::VectorXd::Constant(1, 5.0)}}};
  const auto P = assemble_P1(d, toy_dictionary(), model::DisturbanceSet::linf_box(1, 1.0));
  const auto m = membership(P, Eigen::VectorXd::Zero(3));
  EXPECT_FALSE(m.member);
  EXPECT_NEAR(m.max_violation, 4.5, 1e-12);
  const auto box = raw_polytope(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, 0.0));
  EXPECT_TRUE(membership(box, Eigen::Vector2d::Zero()).member);
}

TEST(ReduceFaces, RemovesDuplicateRowOnce) {
  Eigen::MatrixXd N(5, 2);
  N << 1, 0, -1, 0, 0, 1, 0, -1, 1, 0;
  const auto P = raw_polytope(N, Eigen::VectorXd::Ones(5));
  const auto r = reduce_faces(P);
  EXPECT_EQ(r.kept.size(), 4u);
  ASSERT_EQ(r.removed.size(), 1u);
  EXPECT_TRUE(r.removed[0].row == 0 || r.removed[0].row == 4);
}

TEST(ReduceFaces, RemovesLooseFaceOfUnitBox) {
  Eigen::MatrixXd N(5, 2);
  N << 1, 0, -1, 0, 0, 1, 0, -1, 1, 0;
  Eigen::VectorXd e = Eigen::VectorXd::Ones(5);
  e(4) = 2.0;
  const auto r = reduce_faces(raw_polytope(N, e));
  EXPECT_EQ(r.kept, (std::vector<int>{0, 1, 2, 3}));
}

TEST(ReduceFaces, FlowPreservesSetAndCertificatesVerify) {
  const auto P = assemble_P1(flow_data(), model::default_dictionary(2, 3, true),
                             model::DisturbanceSet::linf_box(2, 2.0));
  const auto red = reduce_faces(P);
  std::cout << "Flow nonredundant faces: " << red.kept.size() << " of " << P.rows()
            << " (reference figure 91)\n";
  EXPECT_GT(red.kept.size(), 22u);
  EXPECT_LT(red.kept.size(), 324u);
  for (const auto& c : red.removed) EXPECT_TRUE(verify_redundancy_certificate(P, c)) << c.row;

  // Sample around the Chebyshev center at the scale of the polytope.
  const auto cc = chebyshev_center(P);
  ASSERT_TRUE(cc.has_value());
  Eigen::VectorXd lo(P.columns()), hi(P.columns());
  for (Eigen::Index j = 0; j < P.columns(); ++j) {
    hi(j) = lp::maximize(P.N, P.e, Eigen::VectorXd::Unit(P.columns(), j)).objective;
    lo(j) = -lp::maximize(P.N, P.e, -Eigen::VectorXd::Unit(P.columns(), j)).objective;
  }
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int disagreements = 0;
  int inside = 0;
  for (int k = 0; k < 10000; ++k) {
    // Mix hull-box samples with samples shrunk toward the center so that
    // both members and non-members occur.
    Eigen::VectorXd t(P.columns());
    for (Eigen::Index j = 0; j < P.columns(); ++j) t(j) = lo(j) + (hi(j) - lo(j)) * U(rng);
    const double shrink = std::pow(U(rng), 3.0);
    t = cc->first + shrink * (t - cc->first);
    const bool a = membership(P, t, 0.0).member;
    const bool b = membership(red.polytope, t, 0.0).member;
    inside += a;
    disagreements += a != b;
  }
  EXPECT_EQ(disagreements, 0);
  EXPECT_GT(inside, 0);
  EXPECT_LT(inside, 10000);
}

TEST(ReduceFaces, EmptyPolytopeThrows) {
  Eigen::MatrixXd N(2, 1);
  N << 1, -1;
  EXPECT_THROW(reduce_faces(raw_polytope(N, Eigen::Vector2d(-1, -1))), InconsistentDataError);
}

TEST(Compactness, BoxHalfSpaceAndFlow) {
  Eigen::MatrixXd N(4, 2);
  N << 1, 0, -1, 0, 0, 1, 0, -1;
  EXPECT_TRUE(compactness_check(raw_polytope(N, Eigen::VectorXd::Ones(4))));
  Eigen::MatrixXd H(1, 2);
  H << 1, 1;
  EXPECT_FALSE(compactness_check(raw_polytope(H, Eigen::VectorXd::Ones(1))));
  const auto P = assemble_P1(flow_data(), model::default_dictionary(2, 3, true),
                             model::DisturbanceSet::linf_box(2, 2.0));
  EXPECT_TRUE(compactness_check(P));
  Eigen::MatrixXd E(2, 1);
  E << 1, -1;
  EXPECT_THROW(compactness_check(raw_polytope(E, Eigen::Vector2d(-1, -1))), InconsistentDataError);
}

TEST(ContainmentOracle, ZeroCandidateHasZeroMargin) {
  const auto dict = model::default_dictionary(2, 3, true);
  const auto P = assemble_P1(flow_data(), dict, model::DisturbanceSet::linf_box(2, 2.0));
  const poly::Polynomial zero(2);
  const auto h = poly::parse_polynomial("0.16 - (x1+1)^2 - (x2+1)^2", poly::default_variable_names(2));
  const auto r = containment_lp_oracle(P, zero, zero, h, dict, std::vector<double>{0.3, -0.2});
  EXPECT_EQ(r.lp_max, 0.0);
  EXPECT_EQ(r.margin, 0.0);
}

TEST(ContainmentOracle, ScalarBoxMatchesVertexEnumeration) {
  // Columns (f, g, w) with |f| <= 1, |g| <= 1, |w| <= 1; rho = 1, psi = 0.
  Eigen::MatrixXd N(6, 3);
  N << Eigen::MatrixXd::Identity(3, 3), -Eigen::MatrixXd::Identity(3, 3);
  ConsistencyPolytope P = raw_polytope(N, Eigen::VectorXd::Ones(6));
  P.f = {0, 1};
  P.g = {1, 2};
  P.w = {2, 3};
  const ContainmentOracle oracle(P, P1d("1"), poly::Polynomial(1), P1d("-1"), toy_dictionary());
  const auto rx = oracle.r().evaluate(std::vector<double>{0.7});
  EXPECT_EQ(rx(0), -1.0);
  EXPECT_EQ(rx(1), 0.0);
  EXPECT_EQ(rx(2), 0.0);
  double best = -1e300;
  for (int v = 0; v < 8; ++v) {
    const Eigen::Vector3d t((v & 1) ? 1 : -1, (v & 2) ? 1 : -1, (v & 4) ? 1 : -1);
    best = std::max(best, rx.dot(t));
  }
  const auto res = oracle.evaluate(std::vector<double>{0.7});
  EXPECT_NEAR(res.lp_max, best, 1e-12);
  EXPECT_NEAR(res.lp_max, 1.0, 1e-12);
  EXPECT_NEAR(res.margin, 1.0 - 1.0, 1e-12);
  const auto many = oracle.sweep({{0.1}, {0.2}, {0.3}}, 2);
  ASSERT_EQ(many.size(), 3u);
  for (const auto& m : many) EXPECT_NEAR(m.lp_max, 1.0, 1e-12);
}

TEST(DatasetCsv, RoundTripIsExact) {
  const auto data = flow_data();
  std::stringstream ss;
  write_dataset_csv(ss, data);
  const auto back = read_dataset_csv(ss, data.epsilon);
  ASSERT_EQ(back.size(), data.size());
  for (std::size_t s = 0; s < data.size(); ++s) {
    EXPECT_EQ(back.samples[s].x, data.samples[s].x);
    EXPECT_EQ(back.samples[s].u, data.samples[s].u);
    EXPECT_EQ(back.samples[s].y, data.samples[s].y);
  }
  std::stringstream first;
  write_dataset_csv(first, data);
  EXPECT_EQ(first.str().substr(0, 20), "idx,x1,x2,u,y1,y2\n0,");
}

TEST(DatasetCsv, RejectsBadHeaderAndCells) {
  std::stringstream bad("idx,x1,u,y2\n0,1,2,3\n");
  EXPECT_THROW(read_dataset_csv(bad, 0.0), ConfigError);
  std::stringstream cell("idx,x1,u,y1\n0,1,zz,3\n");
  EXPECT_THROW(read_dataset_csv(cell, 0.0), ConfigError);
}

TEST(PolytopeDump, ListsBlocksAndTriplets) {
  Dataset d{1, 0.5, {{Eigen::VectorXd::Constant(1, 2.0), 3.0, Eigen::VectorXd::Constant(1, 5.0)}}};
  const auto P = assemble_P1(d, toy_dictionary(), model::DisturbanceSet::linf_box(1, 1.0));
  std::stringstream ss;
  write_polytope_dump(ss, P);
  const auto text = ss.str();
  EXPECT_NE(text.find("% f 0 1"), std::string::npos);
  EXPECT_NE(text.find("% w 2 3"), std::string::npos);
  EXPECT_NE(text.find("4 3 6\n"), std::string::npos);
  EXPECT_NE(text.find("1 1 2\n"), std::string::npos);
}
