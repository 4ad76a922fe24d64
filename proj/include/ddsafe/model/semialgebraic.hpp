#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddsafe/poly/polynomial.hpp"

namespace ddsafe::model {

/// Axis-aligned box [lo, hi].
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  static Box cube(int n, double lo, double hi);
  int dimension() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> x) const;
};

enum class SetMode { kIntersection, kUnionProduct };

std::string to_string(SetMode mode);
SetMode set_mode_from_string(const std::string& text);

/// {x : h_i(x) >= 0 for all i} (Intersection) or for some i (UnionProduct).
class SemialgebraicSet {
 public:
  SemialgebraicSet(int n, std::vector<poly::Polynomial> polys, SetMode mode);

  int dimension() const { return n_; }
  SetMode mode() const { return mode_; }
  const std::vector<poly::Polynomial>& polys() const { return polys_; }

 private:
  int n_;
  std::vector<poly::Polynomial> polys_;
  SetMode mode_;
};

/// Membership against the original component list.
bool set_contains(const SemialgebraicSet& set, std::span<const double> x);

/// A point where both h1 >= 0 and h2 >= 0 inside `box`, found by a dense grid
/// followed by compass search on min(h1, h2); nullopt when none is found.
std::optional<std::vector<double>> find_common_point(const poly::Polynomial& h1,
                                                     const poly::Polynomial& h2, const Box& box);

/// Single polynomial h with {h >= 0} equal to the set: h itself for one
/// Intersection component, -h1*h2 for two disjoint UnionProduct components
/// (disjointness is verified over `search_box`). Other shapes throw ConfigError.
poly::Polynomial reduced_h(const SemialgebraicSet& set, const Box& search_box);

}  // namespace ddsafe::model
