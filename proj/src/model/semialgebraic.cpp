#include "ddsafe/model/semialgebraic.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ddsafe/error.hpp"
#include "ddsafe/format.hpp"

namespace ddsafe::model {

Box Box::cube(int n, double lo, double hi) {
  return Box{std::vector<double>(static_cast<std::size_t>(n), lo),
             std::vector<double>(static_cast<std::size_t>(n), hi)};
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != lo.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
  }
  return true;
}

std::string to_string(SetMode mode) {
  return mode == SetMode::kIntersection ? "intersection" : "union_product";
}

SetMode set_mode_from_string(const std::string& text) {
  if (text == "intersection") return SetMode::kIntersection;
  if (text == "union_product" || text == "union") return SetMode::kUnionProduct;
  throw ConfigError("unknown set mode '" + text + "' (expected intersection or union_product)");
}

SemialgebraicSet::SemialgebraicSet(int n, std::vector<poly::Polynomial> polys, SetMode mode)
    : n_(n), polys_(std::move(polys)), mode_(mode) {
  for (const auto& p : polys_) {
    if (p.dimension() != n_) throw StructuralError("set polynomial has wrong dimension");
  }
}

bool set_contains(const SemialgebraicSet& set, std::span<const double> x) {
  if (static_cast<int>(x.size()) != set.dimension()) {
    throw StructuralError("membership point has wrong dimension");
  }
  if (set.mode() == SetMode::kIntersection) {
    return std::all_of(set.polys().begin(), set.polys().end(),
                       [&](const poly::Polynomial& h) { return h.evaluate(x) >= 0.0; });
  }
  return std::any_of(set.polys().begin(), set.polys().end(),
                     [&](const poly::Polynomial& h) { return h.evaluate(x) >= 0.0; });
}

std::optional<std::vector<double>> find_common_point(const poly::Polynomial& h1,
                                                     const poly::Polynomial& h2, const Box& box) {
  const int n = box.dimension();
  const auto score = [&](std::span<const double> x) {
    return std::min(h1.evaluate(x), h2.evaluate(x));
  };
  const int per_axis = n == 1 ? 2001 : n == 2 ? 201 : n == 3 ? 41 : 11;
  std::vector<double> step(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    step[static_cast<std::size_t>(i)] =
        (box.hi[static_cast<std::size_t>(i)] - box.lo[static_cast<std::size_t>(i)]) / (per_axis - 1);
  }

  // Grid pass, keeping the best few points as refinement seeds.
  constexpr std::size_t kSeeds = 16;
  std::vector<std::pair<double, std::vector<double>>> seeds;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  while (true) {
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] =
          box.lo[static_cast<std::size_t>(i)] + idx[static_cast<std::size_t>(i)] * step[static_cast<std::size_t>(i)];
    }
    const double s = score(x);
    if (s >= 0.0) return x;
    if (seeds.size() < kSeeds || s > seeds.back().first) {
      seeds.emplace_back(s, x);
      std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
      if (seeds.size() > kSeeds) seeds.pop_back();
    }
    int k = 0;
    while (k < n && ++idx[static_cast<std::size_t>(k)] == per_axis) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }

  // Compass search on min(h1, h2) from each seed.
  for (auto& [s, p] : seeds) {
    std::vector<double> h = step;
    double best = s;
    for (int iter = 0; iter < 2000; ++iter) {
      bool moved = false;
      for (int i = 0; i < n && !moved; ++i) {
        for (double dir : {1.0, -1.0}) {
          std::vector<double> q = p;
          auto& qi = q[static_cast<std::size_t>(i)];
          qi = std::clamp(qi + dir * h[static_cast<std::size_t>(i)], box.lo[static_cast<std::size_t>(i)],
                          box.hi[static_cast<std::size_t>(i)]);
          const double v = score(q);
          if (v > best) {
            best = v;
            p = std::move(q);
            moved = true;
            break;
          }
        }
      }
      if (best >= 0.0) return p;
      if (!moved) {
        double largest = 0.0;
        for (auto& hi : h) {
          hi *= 0.5;
          largest = std::max(largest, hi);
        }
        if (largest < 1e-10) break;
      }
    }
  }
  return std::nullopt;
}

poly::Polynomial reduced_h(const SemialgebraicSet& set, const Box& search_box) {
  const auto& polys = set.polys();
  if (set.mode() == SetMode::kIntersection) {
    if (polys.size() != 1) {
      throw ConfigError("intersection sets must have exactly one polynomial; the general min_i h_i "
                        "reduction is not supported (got " + std::to_string(polys.size()) + ")");
    }
    return polys.front();
  }
  if (polys.size() != 2) {
    throw ConfigError("union_product sets must have exactly two polynomials (got " +
                      std::to_string(polys.size()) + ")");
  }
  if (search_box.dimension() != set.dimension()) {
    throw StructuralError("search box dimension does not match set dimension");
  }
  if (auto witness = find_common_point(polys[0], polys[1], search_box)) {
    std::string at;
    for (double v : *witness) at += (at.empty() ? "" : ", ") + format_double(v);
    throw ConfigError("union_product components are not disjoint; common point (" + at + ")");
  }
  return -(polys[0] * polys[1]);
}

}  // namespace ddsafe::model
