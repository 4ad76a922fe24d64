#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace ddsafe::consistency {

/// One observation: y ~ f(x) + g(x) u within the L-infinity noise bound.
struct Sample {
  Eigen::VectorXd x;
  double u = 0.0;
  Eigen::VectorXd y;
};

struct Dataset {
  int n = 0;
  double epsilon = 0.0;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  /// Throws StructuralError on inconsistent dimensions or negative epsilon.
  void validate() const;
};

/// CSV with header `idx,x1..xn,u,y1..yn` and shortest round-trip decimals.
void write_dataset_csv(std::ostream& out, const Dataset& data);
void save_dataset_csv(const std::string& path, const Dataset& data);

/// Parses the CSV format above; epsilon is not stored in the file.
Dataset read_dataset_csv(std::istream& in, double epsilon);
Dataset load_dataset_csv(const std::string& path, double epsilon);

}  // namespace ddsafe::consistency
