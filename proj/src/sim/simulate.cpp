#include "ddsafe/sim/simulate.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "ddsafe/error.hpp"
#include "ddsafe/format.hpp"
#include "ddsafe/synth/audit.hpp"

namespace ddsafe::sim {

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("simulation dt must be positive");
  if (!(t_end > 0.0)) throw ConfigError("simulation horizon must be positive");
  if (!(hold >= dt)) throw ConfigError("noise hold period must be at least dt");
  if (!(eps_w >= 0.0)) throw ConfigError("process noise bound must be non-negative");
  if (trajectories < 1) throw ConfigError("trajectory count must be at least 1");
  if (!(blowup_threshold > 0.0)) throw ConfigError("blowup threshold must be positive");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::kHorizon: return "horizon";
    case Termination::kBlowup: return "blowup";
    case Termination::kLeftBox: return "left-bounding-box";
    case Termination::kNonFinite: return "non-finite";
  }
  return "unknown";
}

namespace {

std::mt19937_64 stream_for(std::uint64_t seed, int id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id), 0x5151u};
  return std::mt19937_64(seq);
}

bool all_finite(const Eigen::VectorXd& x) { return x.allFinite(); }

}  // namespace

Trajectory simulate(const model::GroundTruthSystem& sys, const synth::RationalController* controller,
                    const std::vector<double>& x0, const SimConfig& cfg, int id) {
  cfg.validate();
  const int n = sys.dict.n;
  if (static_cast<int>(x0.size()) != n) throw StructuralError("initial state dimension differs from the system");
  const model::Box bounds = cfg.bounds.lo.empty() ? model::Box::cube(n, -6.0, 6.0) : cfg.bounds;
  if (bounds.dimension() != n) throw StructuralError("bounding box dimension differs from the system");

  const auto steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
  const auto hold_steps = std::max(1L, static_cast<long>(std::llround(cfg.hold / cfg.dt)));
  std::mt19937_64 rng = stream_for(cfg.seed, id);
  std::uniform_real_distribution<double> noise(-cfg.eps_w, cfg.eps_w);

  Trajectory tr;
  tr.id = id;
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  auto field = [&](const Eigen::VectorXd& s, double u) {
    return Eigen::VectorXd(model::eval_system(sys, std::span<const double>(s.data(), static_cast<std::size_t>(n)), u) + w);
  };
  auto record = [&](double t, double u, double rho) {
    tr.times.push_back(t);
    tr.states.push_back(x);
    tr.controls.push_back(u);
    tr.rho.push_back(rho);
    tr.disturbances.push_back(w);
  };

  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    if (k % hold_steps == 0 && cfg.eps_w > 0.0)
      for (int i = 0; i < n; ++i) w(i) = noise(rng);
    double u = 0.0;
    double rho = 0.0;
    bool blowup = false;
    if (controller) {
      const auto v = controller->evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
      rho = v.rho;
      blowup = v.blowup;
      u = v.u;
    }
    record(t, u, rho);
    if (blowup) {
      tr.reason = Termination::kBlowup;
      break;
    }
    if (k >= steps) {
      tr.reason = Termination::kHorizon;
      break;
    }
    const Eigen::VectorXd k1 = field(x, u);
    const Eigen::VectorXd k2 = field(x + 0.5 * cfg.dt * k1, u);
    const Eigen::VectorXd k3 = field(x + 0.5 * cfg.dt * k2, u);
    const Eigen::VectorXd k4 = field(x + cfg.dt * k3, u);
    x += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!all_finite(x)) {
      record(t + cfg.dt, 0.0, std::numeric_limits<double>::quiet_NaN());
      tr.reason = Termination::kNonFinite;
      break;
    }
    if (!bounds.contains(std::span<const double>(x.data(), static_cast<std::size_t>(n)))) {
      double u_end = 0.0, rho_end = 0.0;
      if (controller) {
        const auto v = controller->evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
        u_end = v.u;
        rho_end = v.rho;
      }
      record(static_cast<double>(k + 1) * cfg.dt, u_end, rho_end);
      tr.reason = Termination::kLeftBox;
      break;
    }
  }
  return tr;
}

std::vector<Trajectory> simulate_all(const model::GroundTruthSystem& sys, const synth::RationalController* controller,
                                     const std::vector<std::vector<double>>& starts, const SimConfig& cfg,
                                     unsigned threads) {
  cfg.validate();
  std::vector<Trajectory> out(starts.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(starts.size(), 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < starts.size();) {
      try {
        out[i] = simulate(sys, controller, starts[i], cfg, static_cast<int>(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

SafetyAudit safety_audit(const std::vector<Trajectory>& trajectories, const model::SemialgebraicSet& X0,
                         const model::SemialgebraicSet& Xu, const poly::Polynomial* rho) {
  SafetyAudit a;
  for (const auto& tr : trajectories) {
    TrajectoryAudit ta;
    ta.id = tr.id;
    ta.reason = tr.reason;
    double prev = std::numeric_limits<double>::quiet_NaN();
    if (!tr.states.empty())
      ta.started_in_x0 = model::set_contains(
          X0, std::span<const double>(tr.states.front().data(), static_cast<std::size_t>(tr.states.front().size())));
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      const auto& x = tr.states[k];
      const std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
      if (!x.allFinite()) continue;
      if (!ta.entered_unsafe && model::set_contains(Xu, xs)) {
        ta.entered_unsafe = true;
        ta.first_violation_time = tr.times[k];
      }
      if (rho) {
        const double r = rho->evaluate(xs);
        ta.min_rho = ta.min_rho ? std::min(*ta.min_rho, r) : r;
        if (std::isfinite(prev) && std::abs(prev) <= 1e-3 && r - prev <= -1e-6) ++ta.boundary_decreases;
        prev = r;
      }
    }
    a.unsafe_count += ta.entered_unsafe ? 1 : 0;
    a.blowup_count += ta.reason == Termination::kBlowup ? 1 : 0;
    a.left_box_count += ta.reason == Termination::kLeftBox ? 1 : 0;
    a.non_finite_count += ta.reason == Termination::kNonFinite ? 1 : 0;
    a.boundary_decreases += ta.boundary_decreases;
    if (ta.min_rho) a.min_rho = a.min_rho ? std::min(*a.min_rho, *ta.min_rho) : *ta.min_rho;
    a.trajectories.push_back(ta);
  }
  if (a.min_rho) {
    double lo = *a.min_rho, hi = lo;
    for (const auto& t : a.trajectories)
      if (t.min_rho) hi = std::max(hi, *t.min_rho);
    constexpr int kBins = 10;
    if (hi == lo) hi = lo + 1.0;
    for (int b = 0; b <= kBins; ++b) a.histogram_edges.push_back(lo + (hi - lo) * b / kBins);
    a.histogram_counts.assign(kBins, 0);
    for (const auto& t : a.trajectories)
      if (t.min_rho) {
        const int b = std::min(kBins - 1, static_cast<int>((*t.min_rho - lo) / (hi - lo) * kBins));
        ++a.histogram_counts[static_cast<std::size_t>(b)];
      }
  }
  return a;
}

void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajectories) {
  const int n = trajectories.empty() || trajectories.front().states.empty()
                    ? 0
                    : static_cast<int>(trajectories.front().states.front().size());
  out << "traj_id,t";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  out << ",u,rho";
  for (int i = 1; i <= n; ++i) out << ",w" << i;
  out << ",terminated\n";
  for (const auto& tr : trajectories) {
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      out << tr.id << ',' << format_double(tr.times[k]);
      for (int i = 0; i < n; ++i) out << ',' << format_double(tr.states[k](i));
      out << ',' << format_double(tr.controls[k]) << ',' << format_double(tr.rho[k]);
      for (int i = 0; i < n; ++i) out << ',' << format_double(tr.disturbances[k](i));
      out << ',' << (k + 1 == tr.states.size() ? 1 : 0) << '\n';
    }
  }
}

void write_audit_json(std::ostream& out, const SafetyAudit& audit) {
  nlohmann::json j;
  j["trajectories"] = audit.trajectories.size();
  j["unsafe_count"] = audit.unsafe_count;
  j["blowup_count"] = audit.blowup_count;
  j["left_box_count"] = audit.left_box_count;
  j["non_finite_count"] = audit.non_finite_count;
  j["blowup_fraction"] = audit.trajectories.empty()
                             ? 0.0
                             : static_cast<double>(audit.blowup_count) / static_cast<double>(audit.trajectories.size());
  j["boundary_decreases"] = audit.boundary_decreases;
  j["min_rho"] = audit.min_rho ? nlohmann::json(*audit.min_rho) : nlohmann::json(nullptr);
  j["min_rho_histogram"] = {{"edges", audit.histogram_edges}, {"counts", audit.histogram_counts}};
  nlohmann::json per = nlohmann::json::array();
  for (const auto& t : audit.trajectories) {
    per.push_back({{"id", t.id},
                   {"started_in_x0", t.started_in_x0},
                   {"entered_unsafe", t.entered_unsafe},
                   {"first_violation_time", t.first_violation_time ? nlohmann::json(*t.first_violation_time) : nullptr},
                   {"min_rho", t.min_rho ? nlohmann::json(*t.min_rho) : nullptr},
                   {"termination", to_string(t.reason)},
                   {"boundary_decreases", t.boundary_decreases}});
  }
  j["per_trajectory"] = std::move(per);
  out << j.dump(1) << "\n";
}

void write_level_set_csv(std::ostream& out, const poly::Polynomial& rho, const model::Box& box, int per_axis) {
  const int n = box.dimension();
  for (int i = 1; i <= n; ++i) out << 'x' << i << ',';
  out << "rho\n";
  for (const auto& x : synth::grid_points(box, per_axis)) {
    for (double v : x) out << format_double(v) << ',';
    out << format_double(rho.evaluate(x)) << '\n';
  }
}

}  // namespace ddsafe::sim
