#include "ddsafe/synth/synthesis.hpp"

#include "ddsafe/error.hpp"
#include "ddsafe/format.hpp"

namespace ddsafe::synth {

std::string to_string(SynthesisStatus s) {
  switch (s) {
    case SynthesisStatus::kCertified: return "certified";
    case SynthesisStatus::kInfeasible: return "infeasible";
    case SynthesisStatus::kNumericalFailure: return "numerical-failure";
    case SynthesisStatus::kVerificationFailed: return "verification-failed";
  }
  return "unknown";
}

namespace {

GramCertificate gram_of(const sos::SolveReport& r, int block, int degree) {
  return {degree, r.grams.at(static_cast<std::size_t>(block))};
}

std::string degree_text(const Degrees& d) { return "(d1, d2) = (" + std::to_string(d.d1) + ", " + std::to_string(d.d2) + ")"; }

}  // namespace

SafetyCertificate extract_certificate(const DualProgram& A, const sos::SolveReport& report) {
  const auto& prog = A.program;
  SafetyCertificate c;
  c.n = prog.dimension();
  c.degrees.rho = A.rho.degree;
  c.degrees.psi = A.psi.degree;
  c.degrees.d1 = A.y.layout->degree;
  c.degrees.d2 = A.s1.layout->degree;
  c.rho = prog.value(A.rho, report);
  c.psi = prog.value(A.psi, report);
  for (int i = 0; i < A.y.count; ++i) {
    c.y.push_back(prog.value(A.y, i, report));
    c.y_grams.push_back(gram_of(report, A.y.blocks[static_cast<std::size_t>(i)], A.y.layout->degree));
  }
  c.s1 = prog.value(A.s1, report);
  c.s2 = prog.value(A.s2, report);
  c.s1_gram = gram_of(report, A.s1.block, A.s1.layout->degree);
  c.s2_gram = gram_of(report, A.s2.block, A.s2.layout->degree);
  for (std::size_t i = 0; i < 5; ++i) c.membership_grams[i] = gram_of(report, A.membership_blocks[i], A.membership_degrees[i]);
  c.c1 = prog.scalar(A.c1, report);
  c.c2 = prog.scalar(A.c2, report);
  c.h = A.h;
  c.k = A.k;
  const auto stats = prog.stats();
  c.solver = {report.solver,
              to_string(report.status),
              report.iterations,
              report.objective,
              report.dual_bound,
              report.primal_infeasibility,
              report.dual_infeasibility,
              report.relative_gap,
              stats.psd_blocks,
              stats.max_block_size,
              stats.equalities};
  if (report.verification) {
    c.sos_verified = report.verification->sound;
    c.sos_max_residual = report.verification->max_coefficient_residual;
    c.sos_min_eigenvalue = report.verification->min_eigenvalue;
  }
  return c;
}

SynthesisOutcome run_synthesis(const SynthesisSpec& spec, const sdp::ConicSolver& solver, const SynthesisOptions& options) {
  SynthesisOutcome out;
  SynthesisSpec current = spec;
  for (;;) {
    out.degrees = current.degrees;
    const DualProgram A = assemble_dual_program(current);
    const auto report = A.program.solve(solver, options.solve);
    Attempt at;
    at.degrees = current.degrees;
    at.solve_status = report.status;
    at.stats = A.program.stats();
    at.iterations = report.iterations;
    at.seconds = report.seconds;
    at.dual_bound = report.dual_bound;
    at.message = report.message;
    if (report.status == sos::SolveStatus::kFeasible) at.margin = report.objective;
    out.attempts.push_back(at);

    const bool feasible = report.status == sos::SolveStatus::kFeasible && report.objective >= options.min_margin;
    // The program is a cone; a dual bound below the margin means no certificate
    // with min(c1, c2) >= min_margin exists on the trace-bounded slice.
    const bool infeasible = report.status == sos::SolveStatus::kInfeasibleCertified ||
                            (report.status == sos::SolveStatus::kFeasible && report.dual_bound < options.min_margin);
    if (feasible) {
      SafetyCertificate cert = extract_certificate(A, report);
      cert.provenance = options.provenance;
      Audit audit = check_certificate(cert, current, options.tolerances);
      const int per_axis = options.audit_per_axis > 0 ? options.audit_per_axis : default_audit_per_axis(spec.dict.n);
      const auto points = grid_points(current.search_box, per_axis);
      const Audit theorem = verify_theorem_conditions(cert, current, points, options.tolerances, options.threads);
      audit.gates.insert(audit.gates.end(), theorem.gates.begin(), theorem.gates.end());
      cert.audit = summarize(theorem, std::to_string(per_axis) + "^" + std::to_string(spec.dict.n), points.size());
      const bool sound = cert.sos_verified && audit.passed();
      out.audit = audit;
      if (sound) {
        out.status = SynthesisStatus::kCertified;
        out.certificate = std::move(cert);
        out.message = "certificate found at " + degree_text(current.degrees) + " with min(c1, c2) = " +
                      format_double(report.objective);
      } else {
        out.status = SynthesisStatus::kVerificationFailed;
        out.rejected = std::move(cert);
        const auto* f = audit.first_failure();
        out.message = f ? "certificate rejected by gate " + f->name + ": " + f->detail
                        : "certificate rejected by the SOS verification";
      }
      return out;
    }
    if (!infeasible) {
      out.status = SynthesisStatus::kNumericalFailure;
      out.message = "solver failed at " + degree_text(current.degrees) + ": " + report.message + " (status " +
                    to_string(report.status) + ", objective " + format_double(report.objective) + ", dual bound " +
                    format_double(report.dual_bound) + ")";
      return out;
    }
    out.status = SynthesisStatus::kInfeasible;
    out.message = "infeasible at degree " + degree_text(current.degrees) + " (dual bound on min(c1, c2) " +
                  format_double(report.dual_bound) + ")";
    if (current.degrees.d1 + 1 > options.escalate_cap) return out;
    ++current.degrees.d1;
    ++current.degrees.d2;
  }
}

}  // namespace ddsafe::synth
