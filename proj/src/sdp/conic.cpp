#include "ddsafe/sdp/conic.hpp"

#include <map>
#include <ostream>
#include <tuple>

#include "ddsafe/error.hpp"
#include "ddsafe/format.hpp"

namespace ddsafe::sdp {

std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::kOptimal: return "optimal";
    case SolverStatus::kPrimalInfeasible: return "primal_infeasible";
    case SolverStatus::kDualInfeasible: return "dual_infeasible";
    case SolverStatus::kIterationLimit: return "iteration_limit";
    case SolverStatus::kNumericalError: return "numerical_error";
  }
  return "unknown";
}

int ConicProblem::max_block_size() const {
  int s = 0;
  for (const auto& b : blocks) s = std::max(s, b.size);
  return s;
}

void ConicProblem::validate() const {
  const int nb = static_cast<int>(blocks.size());
  const int ns = static_cast<int>(scalars.size());
  const int m = static_cast<int>(rows.size());
  if (objective.size() != ns) throw StructuralError("objective length differs from scalar count");
  for (const auto& b : blocks) {
    if (b.size < 1) throw StructuralError("PSD block of size < 1");
    if (!b.atoms) throw StructuralError("PSD block without atom set");
    for (const auto& atom : *b.atoms)
      for (const auto& e : atom)
        if (e.p < 0 || e.q < 0 || e.p >= b.size || e.q >= b.size)
          throw StructuralError("atom entry outside block " + b.label);
  }
  std::vector<int> family_of(static_cast<std::size_t>(nb), -1);
  for (std::size_t f = 0; f < families.size(); ++f) {
    const auto& fam = families[f];
    if (fam.members.empty()) throw StructuralError("empty block family");
    if (fam.coef.rows() != static_cast<Eigen::Index>(fam.members.size()) ||
        fam.coef.cols() != static_cast<Eigen::Index>(fam.rows.size()))
      throw StructuralError("family coefficient shape mismatch");
    const auto& atoms = blocks.at(static_cast<std::size_t>(fam.members.front())).atoms;
    for (int k : fam.members) {
      if (k < 0 || k >= nb) throw StructuralError("family member out of range");
      if (family_of[static_cast<std::size_t>(k)] >= 0) throw StructuralError("block in two families");
      family_of[static_cast<std::size_t>(k)] = static_cast<int>(f);
      if (blocks[static_cast<std::size_t>(k)].atoms != atoms)
        throw StructuralError("family members must share one atom set");
    }
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (const auto& col : fam.rows) {
      if (col.size() != atoms->size()) throw StructuralError("family row map has wrong atom count");
      for (int r : col) {
        if (r < 0) continue;
        if (r >= m) throw StructuralError("family row out of range");
        if (seen[static_cast<std::size_t>(r)]) throw StructuralError("row appears twice in one family");
        seen[static_cast<std::size_t>(r)] = 1;
      }
    }
  }
  for (const auto& row : rows) {
    for (const auto& t : row.scalars)
      if (t.var < 0 || t.var >= ns) throw StructuralError("scalar term out of range in row " + row.label);
    for (const auto& t : row.blocks) {
      if (t.block < 0 || t.block >= nb) throw StructuralError("block term out of range in row " + row.label);
      if (family_of[static_cast<std::size_t>(t.block)] >= 0)
        throw StructuralError("family member used in a plain block term");
      const auto& atoms = *blocks[static_cast<std::size_t>(t.block)].atoms;
      if (t.atom < 0 || t.atom >= static_cast<int>(atoms.size()))
        throw StructuralError("atom index out of range in row " + row.label);
    }
  }
}

void write_debug_dump(std::ostream& out, const ConicProblem& problem) {
  out << "VARS " << problem.scalars.size() << "\n";
  for (std::size_t i = 0; i < problem.scalars.size(); ++i) {
    const auto& v = problem.scalars[i];
    out << i << ' ' << (v.kind == ScalarKind::kFree ? "free" : "nonneg") << ' ' << v.label << "\n";
  }
  out << "PSD " << problem.blocks.size() << "\n";
  for (std::size_t k = 0; k < problem.blocks.size(); ++k)
    out << k << ' ' << problem.blocks[k].size << ' ' << problem.blocks[k].label << "\n";

  // (row, kind, var/block, p, q) -> coefficient, with p <= q for PSD entries.
  std::map<std::tuple<int, int, int, int, int>, double> trip;
  auto add_block = [&](int row, int block, int atom, double c) {
    for (const auto& e : (*problem.blocks[static_cast<std::size_t>(block)].atoms)[static_cast<std::size_t>(atom)]) {
      if (e.p > e.q) continue;
      trip[{row, 1, block, e.p, e.q}] += c * e.w;
    }
  };
  for (std::size_t r = 0; r < problem.rows.size(); ++r) {
    const int ri = static_cast<int>(r);
    for (const auto& t : problem.rows[r].scalars) trip[{ri, 0, t.var, 0, 0}] += t.coef;
    for (const auto& t : problem.rows[r].blocks) add_block(ri, t.block, t.atom, t.coef);
  }
  for (const auto& fam : problem.families)
    for (std::size_t j = 0; j < fam.rows.size(); ++j)
      for (std::size_t a = 0; a < fam.rows[j].size(); ++a) {
        const int r = fam.rows[j][a];
        if (r < 0) continue;
        for (std::size_t i = 0; i < fam.members.size(); ++i) {
          const double c = fam.coef(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          if (c != 0.0) add_block(r, fam.members[i], static_cast<int>(a), c);
        }
      }
  std::size_t nnz = 0;
  for (const auto& [k, v] : trip) nnz += v != 0.0;
  out << "EQ " << problem.rows.size() << ' ' << nnz << "\n";
  for (const auto& [k, v] : trip) {
    if (v == 0.0) continue;
    const auto& [row, kind, idx, p, q] = k;
    if (kind == 0)
      out << row << " s " << idx << ' ' << format_double(v) << "\n";
    else
      out << row << " X " << idx << ' ' << p << ' ' << q << ' ' << format_double(v) << "\n";
  }
  out << "RHS\n";
  for (std::size_t r = 0; r < problem.rows.size(); ++r)
    if (problem.rows[r].rhs != 0.0) out << r << ' ' << format_double(problem.rows[r].rhs) << "\n";
  out << "OBJ\n";
  for (Eigen::Index i = 0; i < problem.objective.size(); ++i)
    if (problem.objective(i) != 0.0) out << i << ' ' << format_double(problem.objective(i)) << "\n";
}

}  // namespace ddsafe::sdp
