#include "ddsafe/cli/commands.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ddsafe/error.hpp"
#include "ddsafe/format.hpp"
#include "ddsafe/io/hash.hpp"
#include "ddsafe/sim/data.hpp"
#include "ddsafe/sim/simulate.hpp"
#include "ddsafe/synth/audit.hpp"
#include "ddsafe/synth/complexity.hpp"
#include "ddsafe/synth/controller.hpp"
#include "ddsafe/synth/synthesis.hpp"

namespace ddsafe::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required flag ") + flag);
}

/// Manifest of one command invocation; every produced file is listed with its hash.
class Manifest {
 public:
  Manifest(std::string command, const Options& opt) : started_(utc_now()) {
    j_["tool_version"] = kToolVersion;
    j_["command"] = std::move(command);
    if (!opt.config.empty()) j_["config"] = {{"path", opt.config}, {"sha256", io::sha256_file(opt.config)}};
    if (!opt.dataset.empty()) j_["dataset"] = {{"path", opt.dataset}, {"sha256", io::sha256_file(opt.dataset)}};
    if (!opt.certificate.empty())
      j_["certificate"] = {{"path", opt.certificate}, {"sha256", io::sha256_file(opt.certificate)}};
    if (opt.seed) j_["seed"] = *opt.seed;
    if (opt.eps_w_override) j_["eps_w_override"] = *opt.eps_w_override;
    j_["files"] = json::array();
  }

  void add_file(const std::string& path) {
    j_["files"].push_back({{"path", path}, {"sha256", io::sha256_file(path)}, {"bytes", fs::file_size(path)}});
  }
  void set(const std::string& key, json value) { j_[key] = std::move(value); }

  void write(const std::string& path, const std::string& output_dir) {
    j_["output_dir"] = output_dir;
    j_["started"] = started_;
    j_["finished"] = utc_now();
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write manifest '" + path + "'");
    out << j_.dump(1) << "\n";
  }

 private:
  json j_;
  std::string started_;
};

std::string parent_dir(const std::string& path) {
  const auto p = fs::path(path).parent_path();
  return p.empty() ? "." : p.string();
}

void ensure_parent(const std::string& path) {
  const auto p = fs::path(path).parent_path();
  if (!p.empty()) fs::create_directories(p);
}

double eps_w_of(const Options& opt, const io::ProblemConfig& cfg) {
  const double e = opt.eps_w_override.value_or(cfg.eps_w);
  if (!(e >= 0.0)) throw ConfigError("--eps-w-override must be non-negative");
  return e;
}

std::string reference_note(const std::optional<int>& ref) {
  return ref ? " (reference " + std::to_string(*ref) + ")" : "";
}

}  // namespace

Problem build_problem(const io::ProblemConfig& config, const consistency::Dataset& data, double eps_w) {
  if (data.n != config.n) throw ConfigError("dataset dimension differs from the configured system");
  auto full = consistency::assemble_P1(data, config.prior, model::DisturbanceSet::linf_box(config.n, eps_w));
  auto reduction = consistency::reduce_faces(full);
  synth::SynthesisSpec spec{reduction.polytope,    config.initial.make(config.n), config.unsafe.make(config.n),
                            config.prior,          config.synth.degrees,          config.synth.search_box};
  Problem p{config, data, eps_w, std::move(full), std::move(reduction), std::move(spec)};
  return p;
}

int cmd_gen(const Options& opt, std::ostream& log) {
  require(opt.config, "--config");
  require(opt.out, "--out");
  const auto cfg = io::load_config(opt.config);
  const auto seed = opt.seed.value_or(cfg.data.seed);
  const auto data = sim::generate_dataset(cfg.system, cfg.data.samples, cfg.data.epsilon, cfg.data.box, cfg.data.input, seed);
  ensure_parent(opt.out);
  consistency::save_dataset_csv(opt.out, data);
  Manifest m("gen", opt);
  m.set("data_seed", seed);
  m.add_file(opt.out);
  m.write(opt.out + ".manifest.json", parent_dir(opt.out));
  log << "samples=" << data.size() << " n=" << data.n << " epsilon=" << format_double(data.epsilon) << "\n";
  log << "max_residual=" << format_double(sim::max_residual(cfg.system, data)) << "\n";
  log << "dataset_sha256=" << io::sha256_file(opt.out) << "\n";
  return kOk;
}

int cmd_synth(const Options& opt, std::ostream& log) {
  require(opt.config, "--config");
  require(opt.dataset, "--dataset");
  require(opt.out, "--out");
  const auto cfg = io::load_config(opt.config);
  const auto data = consistency::load_dataset_csv(opt.dataset, cfg.data.epsilon);
  const Problem p = build_problem(cfg, data, eps_w_of(opt, cfg));
  log << "columns=" << p.full.columns() << " faces=" << p.full.rows() << " nonredundant=" << p.spec.P1.rows() << "\n";
  {
    const auto A = synth::assemble_dual_program(p.spec);
    const auto st = A.program.stats();
    log << "gram_blocks=" << st.psd_blocks << " max_gram=" << st.max_block_size << " equalities=" << st.equalities
        << " scalars=" << st.scalar_unknowns << "\n";
  }

  synth::SynthesisOptions so;
  so.escalate_cap = opt.escalate_cap.value_or(cfg.synth.escalate_cap);
  so.min_margin = cfg.synth.min_margin;
  so.audit_per_axis = cfg.synth.audit_per_axis;
  so.threads = opt.threads;
  so.provenance = {io::sha256_file(opt.config), io::sha256_file(opt.dataset), cfg.data.seed, kToolVersion};
  const sdp::InteriorPointSolver solver;
  const auto outcome = synth::run_synthesis(p.spec, solver, so);
  for (const auto& a : outcome.attempts)
    log << "attempt d1=" << a.degrees.d1 << " d2=" << a.degrees.d2 << " status=" << sos::to_string(a.solve_status)
        << " margin=" << format_double(a.margin) << " dual_bound=" << format_double(a.dual_bound)
        << " iterations=" << a.iterations << " solver_seconds=" << format_double(a.seconds) << "\n";
  if (outcome.audit)
    for (const auto& g : outcome.audit->gates)
      log << "gate " << g.name << " " << (g.passed ? "pass" : "FAIL") << ": " << g.detail << "\n";
  log << "status=" << synth::to_string(outcome.status) << ": " << outcome.message << "\n";

  ensure_parent(opt.out);
  Manifest m("synth", opt);
  m.set("status", synth::to_string(outcome.status));
  double seconds = 0.0;
  for (const auto& a : outcome.attempts) seconds += a.seconds;
  m.set("solver_seconds", seconds);
  if (outcome.certificate) {
    synth::save_certificate_json(opt.out, *outcome.certificate);
  } else {
    json rec;
    rec["schema"] = synth::kCertificateSchema;
    rec["status"] = synth::to_string(outcome.status);
    rec["message"] = outcome.message;
    rec["degrees"] = {{"rho", outcome.degrees.rho}, {"psi", outcome.degrees.psi}, {"d1", outcome.degrees.d1}, {"d2", outcome.degrees.d2}};
    json attempts = json::array();
    for (const auto& a : outcome.attempts)
      attempts.push_back({{"d1", a.degrees.d1},
                          {"d2", a.degrees.d2},
                          {"solve_status", sos::to_string(a.solve_status)},
                          {"margin", a.margin},
                          {"dual_bound", a.dual_bound},
                          {"iterations", a.iterations},
                          {"message", a.message}});
    rec["attempts"] = std::move(attempts);
    std::ofstream out(opt.out);
    if (!out) throw ConfigError("cannot write '" + opt.out + "'");
    out << rec.dump(1) << "\n";
  }
  m.add_file(opt.out);
  m.write(opt.out + ".manifest.json", parent_dir(opt.out));
  switch (outcome.status) {
    case synth::SynthesisStatus::kCertified: return kOk;
    case synth::SynthesisStatus::kInfeasible: return kInfeasible;
    case synth::SynthesisStatus::kNumericalFailure: return kNumerical;
    case synth::SynthesisStatus::kVerificationFailed: return kVerification;
  }
  return kNumerical;
}

int cmd_simulate(const Options& opt, std::ostream& log) {
  require(opt.config, "--config");
  require(opt.out, "--out");
  if (opt.open_loop == !opt.certificate.empty())
    throw ConfigError("simulate needs exactly one of --certificate and --open-loop");
  const auto cfg = io::load_config(opt.config);
  sim::SimConfig sc = cfg.simulation.sim;
  if (opt.seed) sc.seed = *opt.seed;
  if (opt.eps_w_override) sc.eps_w = *opt.eps_w_override;
  sc.validate();

  std::optional<synth::SafetyCertificate> cert;
  std::optional<synth::RationalController> ctl;
  if (!opt.certificate.empty()) {
    cert = synth::load_certificate_json(opt.certificate);
    if (cert->n != cfg.n) throw ConfigError("certificate dimension differs from the configured system");
    ctl.emplace(synth::make_controller(*cert, sc.blowup_threshold));
  }
  const auto X0 = cfg.initial.make(cfg.n);
  const auto Xu = cfg.unsafe.make(cfg.n);
  const auto starts = sim::sample_initial_conditions(X0, sc.trajectories, sc.seed, cfg.simulation.init_box);
  const auto trs = sim::simulate_all(cfg.system, ctl ? &*ctl : nullptr, starts, sc, opt.threads);
  const auto audit = sim::safety_audit(trs, X0, Xu, cert ? &cert->rho : nullptr);

  fs::create_directories(opt.out);
  Manifest m("simulate", opt);
  const std::string traj = (fs::path(opt.out) / "trajectories.csv").string();
  const std::string aud = (fs::path(opt.out) / "audit.json").string();
  {
    std::ofstream f(traj);
    sim::write_trajectories_csv(f, trs);
  }
  {
    std::ofstream f(aud);
    sim::write_audit_json(f, audit);
  }
  m.add_file(traj);
  m.add_file(aud);
  if (cert) {
    const std::string lvl = (fs::path(opt.out) / "levelset.csv").string();
    std::ofstream f(lvl);
    sim::write_level_set_csv(f, cert->rho, cfg.synth.search_box, cfg.simulation.level_set_per_axis);
    f.close();
    m.add_file(lvl);
  }
  m.set("mode", cert ? "closed-loop" : "open-loop");
  m.set("eps_w", sc.eps_w);
  m.write((fs::path(opt.out) / "manifest.json").string(), opt.out);

  log << "mode=" << (cert ? "closed-loop" : "open-loop") << " trajectories=" << trs.size()
      << " eps_w=" << format_double(sc.eps_w) << "\n";
  log << "unsafe_count=" << audit.unsafe_count << " blowup_count=" << audit.blowup_count
      << " left_box_count=" << audit.left_box_count << " blowup_fraction="
      << format_double(static_cast<double>(audit.blowup_count) / static_cast<double>(std::max<std::size_t>(trs.size(), 1)))
      << "\n";
  if (audit.min_rho) log << "min_rho=" << format_double(*audit.min_rho) << " boundary_decreases=" << audit.boundary_decreases << "\n";
  return kOk;
}

int cmd_verify(const Options& opt, std::ostream& log) {
  require(opt.config, "--config");
  require(opt.dataset, "--dataset");
  require(opt.certificate, "--certificate");
  const auto cfg = io::load_config(opt.config);
  const auto cert = synth::load_certificate_json(opt.certificate);
  if (cert.n != cfg.n) throw ConfigError("certificate dimension differs from the configured system");
  const auto data = consistency::load_dataset_csv(opt.dataset, cfg.data.epsilon);
  const Problem p = build_problem(cfg, data, eps_w_of(opt, cfg));
  if (!cert.provenance.data_sha256.empty() && cert.provenance.data_sha256 != io::sha256_file(opt.dataset))
    log << "note: dataset hash differs from the certificate provenance\n";

  synth::Audit audit = synth::check_certificate(cert, p.spec);
  const int per_axis = cfg.synth.audit_per_axis > 0 ? cfg.synth.audit_per_axis : synth::default_audit_per_axis(cfg.n);
  const auto points = synth::grid_points(p.spec.search_box, per_axis);
  const auto theorem = synth::verify_theorem_conditions(cert, p.spec, points, {}, opt.threads);
  audit.gates.insert(audit.gates.end(), theorem.gates.begin(), theorem.gates.end());
  std::string failed;
  for (const auto& g : audit.gates) {
    log << "gate " << g.name << " " << (g.passed ? "pass" : "FAIL") << ": " << g.detail << "\n";
    if (!g.passed) failed += (failed.empty() ? "" : ",") + g.name;
  }
  if (!failed.empty()) {
    log << "verification failed: " << failed << "\n";
    return kVerification;
  }
  log << "verification passed\n";
  return kOk;
}

int cmd_report(const Options& opt, std::ostream& log) {
  auto row = [&](const std::string& label, const synth::ComplexityReport& r) {
    log << label << ": d_p=" << r.d_p << " d_r=" << r.d_r << "  " << synth::describe(r) << "\n";
  };
  log << "max Gram size, direct Positivstellensatz in (x, f, g, w) vs dual formulation in x\n";
  row("second-order quadratic scenario (d_f = d_g = 6)", synth::complexity_report(2, 12, 3));
  row("Flow example at d1 = 4 (d_f = 18, d_g = 2)", synth::complexity_report(2, 20, 4));
  if (opt.config.empty()) return kOk;

  const auto cfg = io::load_config(opt.config);
  const auto data = sim::generate_dataset(cfg.system, cfg.data.samples, cfg.data.epsilon, cfg.data.box, cfg.data.input,
                                          opt.seed.value_or(cfg.data.seed));
  const Problem p = build_problem(cfg, data, eps_w_of(opt, cfg));
  const auto rep = synth::complexity_report(p.spec);
  row("config " + cfg.name, rep);
  const auto A = synth::assemble_dual_program(p.spec);
  const auto st = A.program.stats();
  const int n = cfg.n;
  const auto dim_f = static_cast<int>(static_cast<std::size_t>(n) * cfg.prior.d_f());
  log << "columns=" << p.full.columns() << reference_note(cfg.reference.columns) << " faces=" << p.full.rows()
      << reference_note(cfg.reference.faces) << " nonredundant=" << p.spec.P1.rows() << reference_note(cfg.reference.nonredundant) << "\n";
  log << "dim_f=" << dim_f << reference_note(cfg.reference.dim_f) << " dim_g=" << n * static_cast<int>(cfg.prior.d_g())
      << " dim_w=" << n << "\n";
  log << "gram_blocks=" << st.psd_blocks << reference_note(cfg.reference.gram_blocks) << " max_gram=" << st.max_block_size
      << reference_note(cfg.reference.max_gram) << "\n";
  auto note = [&](const char* what, long computed, const std::optional<int>& ref) {
    if (ref && computed != *ref)
      log << "note: " << what << " computed " << computed << " differs from the reference figure " << *ref << "\n";
  };
  note("columns", static_cast<long>(p.full.columns()), cfg.reference.columns);
  note("faces", static_cast<long>(p.full.rows()), cfg.reference.faces);
  note("nonredundant faces", static_cast<long>(p.spec.P1.rows()), cfg.reference.nonredundant);
  note("Gram blocks", st.psd_blocks, cfg.reference.gram_blocks);
  note("max Gram size", st.max_block_size, cfg.reference.max_gram);
  note("dim(f)", dim_f, cfg.reference.dim_f);
  return kOk;
}

int run(const std::string& command, const Options& opt, std::ostream& log, std::ostream& err) {
  try {
    if (command == "gen") return cmd_gen(opt, log);
    if (command == "synth") return cmd_synth(opt, log);
    if (command == "simulate") return cmd_simulate(opt, log);
    if (command == "verify") return cmd_verify(opt, log);
    if (command == "report") return cmd_report(opt, log);
    err << "error: unknown command '" << command << "'\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const InconsistentDataError& e) {
    err << "inconsistent data: " << e.what() << "\n";
    return kUsage;
  } catch (const StructuralError& e) {
    err << "invalid problem: " << e.what() << "\n";
    return kUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "file error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace ddsafe::cli
