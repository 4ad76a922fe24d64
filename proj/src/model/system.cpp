#include "ddsafe/model/system.hpp"

#include <algorithm>

#include "ddsafe/error.hpp"
#include "ddsafe/poly/parser.hpp"

namespace ddsafe::model {
namespace {

Eigen::MatrixXd coefficients_in(const poly::PolyVector& field, const poly::PolyVector& dict,
                                const char* what) {
  std::vector<poly::Monomial> monos;
  for (const auto& p : dict) {
    if (p.size() != 1 || p.terms().begin()->second != 1.0) {
      throw StructuralError("dictionary entries must be unit monomials");
    }
    monos.push_back(p.terms().begin()->first);
  }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(field.size()),
                                            static_cast<Eigen::Index>(monos.size()));
  for (std::size_t i = 0; i < field.size(); ++i) {
    for (const auto& [m, c] : field[i].terms()) {
      auto it = std::find(monos.begin(), monos.end(), m);
      if (it == monos.end()) {
        throw StructuralError(std::string(what) + " has a monomial outside the dictionary: " +
                              m.to_string());
      }
      C(static_cast<Eigen::Index>(i), it - monos.begin()) = c;
    }
  }
  return C;
}

poly::PolyVector parse_field(int n, std::initializer_list<const char*> entries) {
  const auto names = poly::default_variable_names(n);
  std::vector<poly::Polynomial> out;
  for (const char* e : entries) out.push_back(poly::parse_polynomial(e, names));
  return poly::PolyVector(n, std::move(out));
}

}  // namespace

GroundTruthSystem from_polynomials(std::string name, const poly::PolyVector& f,
                                   const poly::PolyVector& g, const Dictionary& dict) {
  if (static_cast<int>(f.size()) != dict.n || static_cast<int>(g.size()) != dict.n) {
    throw StructuralError("system fields must have one entry per state");
  }
  return GroundTruthSystem{std::move(name), coefficients_in(f, dict.phi, "f"),
                           coefficients_in(g, dict.gamma, "g"), dict};
}

GroundTruthSystem flow_system() {
  return from_polynomials("flow", parse_field(2, {"x2", "-x1 + 1/3*x1^3 - x2"}),
                          parse_field(2, {"0", "1"}), default_dictionary(2, 3, true));
}

GroundTruthSystem twist_system() {
  return from_polynomials("twist",
                          parse_field(3, {"-2.5*x1 + x2 - 0.5*x3 + 2*x1^3 + 2*x3^3",
                                          "-x1 + 1.5*x2 + 0.5*x3 - 2*x2^3 - 2*x3^3",
                                          "1.5*x1 + 2.5*x2 - 2*x3 - 2*x1^3 - 2*x2^3"}),
                          parse_field(3, {"0", "0", "1"}), default_dictionary(3, 3, true));
}

GroundTruthSystem system_by_name(const std::string& name) {
  if (name == "flow") return flow_system();
  if (name == "twist") return twist_system();
  throw ConfigError("unknown ground-truth system '" + name + "' (expected flow or twist)");
}

Eigen::VectorXd eval_system(const GroundTruthSystem& sys, std::span<const double> x, double u) {
  if (static_cast<int>(x.size()) != sys.dict.n) throw StructuralError("state has wrong dimension");
  return sys.F * sys.dict.phi.evaluate(x) + u * (sys.G * sys.dict.gamma.evaluate(x));
}

Eigen::VectorXd stacked_parameters(const GroundTruthSystem& sys) {
  Eigen::VectorXd theta(sys.F.size() + sys.G.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < sys.F.rows(); ++i) {
    for (Eigen::Index j = 0; j < sys.F.cols(); ++j) theta(k++) = sys.F(i, j);
  }
  for (Eigen::Index i = 0; i < sys.G.rows(); ++i) {
    for (Eigen::Index j = 0; j < sys.G.cols(); ++j) theta(k++) = sys.G(i, j);
  }
  return theta;
}

}  // namespace ddsafe::model
