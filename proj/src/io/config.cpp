#include "ddsafe/io/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>

#include "ddsafe/error.hpp"
#include "ddsafe/io/hash.hpp"
#include "ddsafe/poly/basis.hpp"
#include "ddsafe/poly/parser.hpp"

namespace ddsafe::io {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) const {
    std::string where = source_;
    if (node.IsDefined() && node.Mark().line >= 0) where += ":" + std::to_string(node.Mark().line + 1);
    throw ConfigError(where + ": field '" + field + "': " + what);
  }

  YAML::Node need(const YAML::Node& parent, const std::string& key, const std::string& path) const {
    const YAML::Node child = parent[key];
    if (!child) fail(parent, path + key, "missing");
    return child;
  }

  template <class T>
  T as(const YAML::Node& node, const std::string& field) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, field, "has the wrong type");
    }
  }

  template <class T>
  T get(const YAML::Node& parent, const std::string& key, const std::string& path) const {
    return as<T>(need(parent, key, path), path + key);
  }

  template <class T>
  T get_or(const YAML::Node& parent, const std::string& key, const std::string& path, T fallback) const {
    const YAML::Node child = parent[key];
    return child ? as<T>(child, path + key) : fallback;
  }

  model::Box box(const YAML::Node& node, const std::string& field, int n) const {
    model::Box b{get<std::vector<double>>(node, "lo", field + "."), get<std::vector<double>>(node, "hi", field + ".")};
    if (b.dimension() != n || static_cast<int>(b.hi.size()) != n) fail(node, field, "needs " + std::to_string(n) + " bounds");
    for (int i = 0; i < n; ++i)
      if (!(b.lo[static_cast<std::size_t>(i)] < b.hi[static_cast<std::size_t>(i)])) fail(node, field, "needs lo < hi");
    return b;
  }

  poly::Polynomial polynomial(const YAML::Node& node, const std::string& field, int n) const {
    const auto text = as<std::string>(node, field);
    try {
      return poly::parse_polynomial(text, poly::default_variable_names(n));
    } catch (const ParseError& e) {
      fail(node, field, std::string("cannot parse polynomial: ") + e.what());
    }
  }

  poly::PolyVector poly_list(const YAML::Node& node, const std::string& field, int n) const {
    if (!node.IsSequence()) fail(node, field, "must be a list of polynomials");
    std::vector<poly::Polynomial> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(polynomial(node[i], field + "[" + std::to_string(i) + "]", n));
    return poly::PolyVector(n, std::move(out));
  }

  SetConfig set(const YAML::Node& node, const std::string& field, int n) const {
    SetConfig s;
    try {
      s.mode = model::set_mode_from_string(get_or<std::string>(node, "mode", field + ".", "intersection"));
    } catch (const ConfigError& e) {
      fail(node, field + ".mode", e.what());
    }
    const YAML::Node polys = need(node, "polys", field + ".");
    if (!polys.IsSequence() || polys.size() == 0) fail(polys, field + ".polys", "must be a nonempty list");
    for (std::size_t i = 0; i < polys.size(); ++i) {
      const std::string f = field + ".polys[" + std::to_string(i) + "]";
      s.text.push_back(as<std::string>(polys[i], f));
      s.polys.push_back(polynomial(polys[i], f, n));
    }
    return s;
  }

 private:
  std::string source_;
};

}  // namespace

ProblemConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": invalid YAML: " + e.msg);
  }
  const Reader r(source);
  if (!root.IsMap()) throw ConfigError(source + ": top level must be a mapping");
  if (r.get<int>(root, "schema", "") != kConfigSchema)
    r.fail(root["schema"], "schema", "unsupported schema (expected " + std::to_string(kConfigSchema) + ")");

  ProblemConfig c;
  c.name = r.get_or<std::string>(root, "name", "", "problem");

  const YAML::Node sys = r.need(root, "system", "");
  if (sys.IsScalar()) {
    c.system = model::system_by_name(r.as<std::string>(sys, "system"));
    c.n = c.system.dict.n;
  } else {
    c.n = r.get<int>(sys, "n", "system.");
    if (c.n < 1) r.fail(sys["n"], "system.n", "must be at least 1");
    const YAML::Node dict = r.need(sys, "dictionary", "system.");
    const auto phi = r.poly_list(r.need(dict, "phi", "system.dictionary."), "system.dictionary.phi", c.n);
    const auto gamma = r.poly_list(r.need(dict, "gamma", "system.dictionary."), "system.dictionary.gamma", c.n);
    const auto f = r.poly_list(r.need(sys, "f", "system."), "system.f", c.n);
    const auto g = r.poly_list(r.need(sys, "g", "system."), "system.g", c.n);
    try {
      c.system = model::from_polynomials(r.get_or<std::string>(sys, "name", "system.", "custom"), f, g,
                                         model::make_dictionary(c.n, phi, gamma));
    } catch (const std::exception& e) {
      r.fail(sys, "system", e.what());
    }
  }

  const YAML::Node prior = root["prior"];
  if (!prior) {
    c.prior = c.system.dict;
  } else if (prior["phi"]) {
    try {
      c.prior = model::make_dictionary(c.n, r.poly_list(prior["phi"], "prior.phi", c.n),
                                       r.poly_list(r.need(prior, "gamma", "prior."), "prior.gamma", c.n));
    } catch (const StructuralError& e) {
      r.fail(prior, "prior", e.what());
    }
  } else {
    const int fdeg = r.get<int>(prior, "f_degree", "prior.");
    const bool zero = r.get_or<bool>(prior, "f_zero_at_origin", "prior.", false);
    std::optional<int> gdeg;
    if (prior["g_degree"]) gdeg = r.get<int>(prior, "g_degree", "prior.");
    if (fdeg < 0 || (gdeg && *gdeg < 0)) r.fail(prior, "prior", "degrees must be non-negative");
    c.prior = model::default_dictionary(c.n, fdeg, zero, gdeg);
  }

  const YAML::Node data = r.need(root, "data", "");
  c.data.samples = r.get<int>(data, "samples", "data.");
  if (c.data.samples < 1) r.fail(data["samples"], "data.samples", "must be at least 1");
  c.data.epsilon = r.get<double>(data, "epsilon", "data.");
  if (!(c.data.epsilon >= 0.0)) r.fail(data["epsilon"], "data.epsilon", "must be non-negative");
  c.data.box = r.box(r.need(data, "box", "data."), "data.box", c.n);
  if (const YAML::Node in = data["input"]) {
    c.data.input = {r.get<double>(in, "lo", "data.input."), r.get<double>(in, "hi", "data.input.")};
    if (!(c.data.input.lo <= c.data.input.hi)) r.fail(in, "data.input", "needs lo <= hi");
  }
  c.data.seed = r.get_or<std::uint64_t>(data, "seed", "data.", 0);

  c.eps_w = r.get<double>(r.need(root, "disturbance", ""), "eps_w", "disturbance.");
  if (!(c.eps_w >= 0.0)) r.fail(root["disturbance"], "disturbance.eps_w", "must be non-negative");

  const YAML::Node sets = r.need(root, "sets", "");
  c.initial = r.set(r.need(sets, "initial", "sets."), "sets.initial", c.n);
  c.unsafe = r.set(r.need(sets, "unsafe", "sets."), "sets.unsafe", c.n);

  const YAML::Node syn = r.need(root, "synthesis", "");
  if (const YAML::Node d = syn["degrees"]) {
    c.synth.degrees = {r.get<int>(d, "rho", "synthesis.degrees."), r.get<int>(d, "psi", "synthesis.degrees."),
                       r.get<int>(d, "d1", "synthesis.degrees."), r.get<int>(d, "d2", "synthesis.degrees.")};
  }
  c.synth.search_box = r.box(r.need(syn, "search_box", "synthesis."), "synthesis.search_box", c.n);
  c.synth.escalate_cap = r.get_or<int>(syn, "escalate_cap", "synthesis.", -1);
  c.synth.min_margin = r.get_or<double>(syn, "min_margin", "synthesis.", 1e-6);
  c.synth.audit_per_axis = r.get_or<int>(syn, "audit_per_axis", "synthesis.", 0);
  if (c.synth.audit_per_axis < 0) r.fail(syn["audit_per_axis"], "synthesis.audit_per_axis", "must be non-negative");

  const YAML::Node simn = r.need(root, "simulation", "");
  auto& s = c.simulation;
  s.sim.trajectories = r.get<int>(simn, "trajectories", "simulation.");
  s.sim.t_end = r.get_or<double>(simn, "t_end", "simulation.", 10.0);
  s.sim.dt = r.get_or<double>(simn, "dt", "simulation.", 1e-3);
  s.sim.hold = r.get_or<double>(simn, "hold", "simulation.", 0.05);
  s.sim.eps_w = r.get_or<double>(simn, "eps_w", "simulation.", c.eps_w);
  s.sim.seed = r.get_or<std::uint64_t>(simn, "seed", "simulation.", 0);
  s.sim.blowup_threshold = r.get_or<double>(simn, "blowup_threshold", "simulation.", 1e4);
  s.sim.bounds = simn["bounds"] ? r.box(simn["bounds"], "simulation.bounds", c.n) : model::Box::cube(c.n, -6.0, 6.0);
  s.init_box = r.box(r.need(simn, "init_box", "simulation."), "simulation.init_box", c.n);
  s.level_set_per_axis = r.get_or<int>(simn, "level_set_per_axis", "simulation.", 101);
  try {
    s.sim.validate();
  } catch (const ConfigError& e) {
    r.fail(simn, "simulation", e.what());
  }
  if (s.level_set_per_axis < 1) r.fail(simn, "simulation.level_set_per_axis", "must be at least 1");

  if (const YAML::Node p = root["reference"]) {
    auto opt = [&](const char* key) -> std::optional<int> {
      if (!p[key]) return std::nullopt;
      return r.get<int>(p, key, "reference.");
    };
    c.reference = {opt("columns"), opt("faces"), opt("nonredundant"), opt("gram_blocks"), opt("max_gram"), opt("dim_f")};
  }
  return c;
}

ProblemConfig load_config(const std::string& path) { return parse_config(read_file(path), path); }

}  // namespace ddsafe::io
