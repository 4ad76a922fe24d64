#include "ddsafe/synth/certificate.hpp"

#include <json.hpp>

#include <fstream>

#include "ddsafe/error.hpp"

namespace ddsafe::synth {

namespace {

using nlohmann::json;

json poly_to_json(const poly::Polynomial& p) {
  json terms = json::array();
  for (const auto& [m, c] : p.terms()) {
    json exps = json::array();
    for (int e : m.exponents()) exps.push_back(e);
    terms.push_back(json::array({exps, c}));
  }
  return terms;
}

poly::Polynomial poly_from_json(const json& j, int n, const std::string& field) {
  if (!j.is_array()) throw ConfigError("certificate field '" + field + "' must be a term list");
  poly::Polynomial p(n);
  for (const auto& term : j) {
    if (!term.is_array() || term.size() != 2 || !term[0].is_array() || !term[1].is_number())
      throw ConfigError("certificate field '" + field + "' has a malformed term");
    auto exps = term[0].get<std::vector<int>>();
    if (static_cast<int>(exps.size()) != n) throw ConfigError("certificate field '" + field + "' has wrong exponent count");
    for (int e : exps)
      if (e < 0) throw ConfigError("certificate field '" + field + "' has a negative exponent");
    p.add_term(poly::Monomial(std::move(exps)), term[1].get<double>());
  }
  return p;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError("certificate field '" + field + "' must be a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd M(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != rows)
      throw ConfigError("certificate field '" + field + "' must be a square matrix");
    for (Eigen::Index c = 0; c < rows; ++c) M(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return M;
}

json gram_to_json(const GramCertificate& g) { return {{"degree", g.degree}, {"Q", matrix_to_json(g.Q)}}; }

GramCertificate gram_from_json(const json& j, const std::string& field) {
  GramCertificate g;
  g.degree = j.at("degree").get<int>();
  g.Q = matrix_from_json(j.at("Q"), field);
  return g;
}

}  // namespace

void write_certificate_json(std::ostream& out, const SafetyCertificate& cert) {
  json j;
  j["schema"] = kCertificateSchema;
  j["n"] = cert.n;
  j["degrees"] = {{"rho", cert.degrees.rho}, {"psi", cert.degrees.psi}, {"d1", cert.degrees.d1}, {"d2", cert.degrees.d2}};
  j["rho"] = poly_to_json(cert.rho);
  j["psi"] = poly_to_json(cert.psi);
  j["c1"] = cert.c1;
  j["c2"] = cert.c2;
  j["s1"] = poly_to_json(cert.s1);
  j["s2"] = poly_to_json(cert.s2);
  j["h"] = poly_to_json(cert.h);
  j["k"] = poly_to_json(cert.k);
  json y = json::array();
  for (const auto& p : cert.y) y.push_back(poly_to_json(p));
  j["y"] = std::move(y);
  json grams;
  json yg = json::array();
  for (const auto& g : cert.y_grams) yg.push_back(gram_to_json(g));
  grams["y"] = std::move(yg);
  grams["s1"] = gram_to_json(cert.s1_gram);
  grams["s2"] = gram_to_json(cert.s2_gram);
  json mg = json::object();
  for (std::size_t i = 0; i < cert.membership_grams.size(); ++i) mg[kMembershipNames[i]] = gram_to_json(cert.membership_grams[i]);
  grams["memberships"] = std::move(mg);
  j["grams"] = std::move(grams);
  const auto& s = cert.solver;
  j["solver_stats"] = {{"solver", s.solver},
                       {"status", s.status},
                       {"iterations", s.iterations},
                       {"objective", s.objective},
                       {"dual_bound", s.dual_bound},
                       {"primal_infeasibility", s.primal_infeasibility},
                       {"dual_infeasibility", s.dual_infeasibility},
                       {"relative_gap", s.relative_gap},
                       {"psd_blocks", s.psd_blocks},
                       {"max_block_size", s.max_block_size},
                       {"equalities", s.equalities}};
  j["verification"] = {{"sound", cert.sos_verified},
                       {"max_coefficient_residual", cert.sos_max_residual},
                       {"min_eigenvalue", cert.sos_min_eigenvalue}};
  const auto& a = cert.audit;
  j["audit"] = {{"grid", a.grid},
                {"points", a.points},
                {"worst_margins",
                 {{"margin", a.worst_margin},
                  {"psi_bound", a.worst_psi_bound},
                  {"min_rho_x0", a.min_rho_x0},
                  {"max_rho_xu", a.max_rho_xu},
                  {"min_oracle_margin", a.min_oracle_margin}}}};
  const auto& p = cert.provenance;
  j["provenance"] = {{"config_sha256", p.config_sha256},
                     {"data_sha256", p.data_sha256},
                     {"seed", p.seed},
                     {"tool_version", p.tool_version}};
  out << j.dump(1) << "\n";
}

void save_certificate_json(const std::string& path, const SafetyCertificate& cert) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write certificate '" + path + "'");
  write_certificate_json(out, cert);
}

SafetyCertificate read_certificate_json(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("certificate is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<int>() != kCertificateSchema) throw ConfigError("unsupported certificate schema");
    SafetyCertificate c;
    c.n = j.at("n").get<int>();
    if (c.n < 1) throw ConfigError("certificate dimension must be positive");
    const auto& d = j.at("degrees");
    c.degrees = {d.at("rho").get<int>(), d.at("psi").get<int>(), d.at("d1").get<int>(), d.at("d2").get<int>()};
    c.rho = poly_from_json(j.at("rho"), c.n, "rho");
    c.psi = poly_from_json(j.at("psi"), c.n, "psi");
    c.c1 = j.at("c1").get<double>();
    c.c2 = j.at("c2").get<double>();
    c.s1 = poly_from_json(j.at("s1"), c.n, "s1");
    c.s2 = poly_from_json(j.at("s2"), c.n, "s2");
    c.h = poly_from_json(j.at("h"), c.n, "h");
    c.k = poly_from_json(j.at("k"), c.n, "k");
    for (const auto& p : j.at("y")) c.y.push_back(poly_from_json(p, c.n, "y"));
    const auto& g = j.at("grams");
    for (const auto& yg : g.at("y")) c.y_grams.push_back(gram_from_json(yg, "grams.y"));
    c.s1_gram = gram_from_json(g.at("s1"), "grams.s1");
    c.s2_gram = gram_from_json(g.at("s2"), "grams.s2");
    for (std::size_t i = 0; i < c.membership_grams.size(); ++i)
      c.membership_grams[i] = gram_from_json(g.at("memberships").at(kMembershipNames[i]), kMembershipNames[i]);
    const auto& s = j.at("solver_stats");
    c.solver.solver = s.at("solver").get<std::string>();
    c.solver.status = s.at("status").get<std::string>();
    c.solver.iterations = s.at("iterations").get<int>();
    c.solver.objective = s.at("objective").get<double>();
    c.solver.dual_bound = s.at("dual_bound").get<double>();
    c.solver.primal_infeasibility = s.at("primal_infeasibility").get<double>();
    c.solver.dual_infeasibility = s.at("dual_infeasibility").get<double>();
    c.solver.relative_gap = s.at("relative_gap").get<double>();
    c.solver.psd_blocks = s.at("psd_blocks").get<int>();
    c.solver.max_block_size = s.at("max_block_size").get<int>();
    c.solver.equalities = s.at("equalities").get<int>();
    const auto& v = j.at("verification");
    c.sos_verified = v.at("sound").get<bool>();
    c.sos_max_residual = v.at("max_coefficient_residual").get<double>();
    c.sos_min_eigenvalue = v.at("min_eigenvalue").get<double>();
    const auto& a = j.at("audit");
    c.audit.grid = a.at("grid").get<std::string>();
    c.audit.points = a.at("points").get<std::size_t>();
    const auto& w = a.at("worst_margins");
    c.audit.worst_margin = w.at("margin").get<double>();
    c.audit.worst_psi_bound = w.at("psi_bound").get<double>();
    c.audit.min_rho_x0 = w.at("min_rho_x0").get<double>();
    c.audit.max_rho_xu = w.at("max_rho_xu").get<double>();
    c.audit.min_oracle_margin = w.at("min_oracle_margin").get<double>();
    const auto& p = j.at("provenance");
    c.provenance.config_sha256 = p.at("config_sha256").get<std::string>();
    c.provenance.data_sha256 = p.at("data_sha256").get<std::string>();
    c.provenance.seed = p.at("seed").get<std::uint64_t>();
    c.provenance.tool_version = p.at("tool_version").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed certificate: ") + e.what());
  }
}

SafetyCertificate load_certificate_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read certificate '" + path + "'");
  return read_certificate_json(in);
}

}  // namespace ddsafe::synth
