#include "ddsafe/sim/data.hpp"

#include <cmath>
#include <random>

#include "ddsafe/error.hpp"

namespace ddsafe::sim {

consistency::Dataset generate_dataset(const model::GroundTruthSystem& sys, int T, double epsilon,
                                      const model::Box& box, const InputPolicy& policy,
                                      std::uint64_t seed) {
  if (T < 1) throw ConfigError("sample count T must be at least 1");
  if (epsilon < 0.0) throw ConfigError("epsilon must be non-negative");
  const int n = sys.dict.n;
  if (box.dimension() != n) throw ConfigError("sampling box dimension differs from state dimension");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  consistency::Dataset data;
  data.n = n;
  data.epsilon = epsilon;
  for (int s = 0; s < T; ++s) {
    consistency::Sample smp{Eigen::VectorXd(n), 0.0, Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
      const double lo = box.lo[static_cast<std::size_t>(i)];
      const double hi = box.hi[static_cast<std::size_t>(i)];
      smp.x(i) = lo + (hi - lo) * unit(rng);
    }
    smp.u = policy.lo + (policy.hi - policy.lo) * unit(rng);
    const Eigen::VectorXd truth =
        model::eval_system(sys, std::span<const double>(smp.x.data(), n), smp.u);
    for (int i = 0; i < n; ++i) {
      const double eta = epsilon * (2.0 * unit(rng) - 1.0);
      double y = truth(i) + eta;
      // Rounding in the sum may push the residual past epsilon by an ulp.
      while (std::abs(y - truth(i)) > epsilon) y = std::nextafter(y, truth(i));
      smp.y(i) = y;
    }
    data.samples.push_back(std::move(smp));
  }
  return data;
}

double max_residual(const model::GroundTruthSystem& sys, const consistency::Dataset& data) {
  double worst = 0.0;
  for (const auto& s : data.samples) {
    const Eigen::VectorXd truth =
        model::eval_system(sys, std::span<const double>(s.x.data(), static_cast<std::size_t>(s.x.size())), s.u);
    worst = std::max(worst, (s.y - truth).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

std::vector<std::vector<double>> sample_initial_conditions(const model::SemialgebraicSet& set, int M,
                                                           std::uint64_t seed, const model::Box& box) {
  if (M < 1) throw ConfigError("trajectory count must be at least 1");
  const int n = set.dimension();
  if (box.dimension() != n) throw ConfigError("sampling box dimension differs from set dimension");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> out;
  std::vector<double> x(static_cast<std::size_t>(n));
  long long draws = 0;
  // Enough draws to see at least ~10 acceptances at the minimum rate.
  const long long min_draws = 100000;
  while (static_cast<int>(out.size()) < M) {
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      x[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * unit(rng);
    }
    ++draws;
    if (model::set_contains(set, x)) out.push_back(x);
    if (draws >= min_draws && static_cast<double>(out.size()) < 1e-4 * static_cast<double>(draws)) {
      throw ConfigError("initial set acceptance rate below 1e-4 in the sampling box (set too thin for "
                        "rejection sampling)");
    }
  }
  return out;
}

}  // namespace ddsafe::sim
