#include "ddsafe/consistency/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ddsafe/error.hpp"
#include "ddsafe/format.hpp"

namespace ddsafe::consistency {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  auto [end, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || end != last) {
    throw ConfigError("dataset line " + std::to_string(line_no) + ": malformed number '" + cell + "'");
  }
  return v;
}

}  // namespace

void Dataset::validate() const {
  if (n < 1) throw StructuralError("dataset state dimension must be positive");
  if (epsilon < 0.0) throw StructuralError("dataset epsilon must be non-negative");
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (samples[s].x.size() != n || samples[s].y.size() != n) {
      throw StructuralError("sample " + std::to_string(s) + " has wrong dimension");
    }
  }
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "idx";
  for (int i = 1; i <= data.n; ++i) out << ",x" << i;
  out << ",u";
  for (int i = 1; i <= data.n; ++i) out << ",y" << i;
  out << '\n';
  for (std::size_t s = 0; s < data.samples.size(); ++s) {
    const auto& smp = data.samples[s];
    out << s;
    for (Eigen::Index i = 0; i < smp.x.size(); ++i) out << ',' << format_double(smp.x(i));
    out << ',' << format_double(smp.u);
    for (Eigen::Index i = 0; i < smp.y.size(); ++i) out << ',' << format_double(smp.y(i));
    out << '\n';
  }
}

void save_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write dataset file " + path);
  write_dataset_csv(out, data);
}

Dataset read_dataset_csv(std::istream& in, double epsilon) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("dataset is empty (missing header)");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  if (header.size() < 4 || (header.size() - 2) % 2 != 0 || header[0] != "idx") {
    throw ConfigError("dataset header must be idx,x1..xn,u,y1..yn");
  }
  const int n = static_cast<int>((header.size() - 2) / 2);
  for (int i = 0; i < n; ++i) {
    if (header[static_cast<std::size_t>(1 + i)] != "x" + std::to_string(i + 1) ||
        header[static_cast<std::size_t>(2 + n + i)] != "y" + std::to_string(i + 1)) {
      throw ConfigError("dataset header must be idx,x1..xn,u,y1..yn");
    }
  }
  if (header[static_cast<std::size_t>(1 + n)] != "u") {
    throw ConfigError("dataset header must be idx,x1..xn,u,y1..yn");
  }
  Dataset data;
  data.n = n;
  data.epsilon = epsilon;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ConfigError("dataset line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields");
    }
    Sample s{Eigen::VectorXd(n), 0.0, Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
      s.x(i) = parse_cell(cells[static_cast<std::size_t>(1 + i)], line_no);
      s.y(i) = parse_cell(cells[static_cast<std::size_t>(2 + n + i)], line_no);
    }
    s.u = parse_cell(cells[static_cast<std::size_t>(1 + n)], line_no);
    data.samples.push_back(std::move(s));
  }
  data.validate();
  return data;
}

Dataset load_dataset_csv(const std::string& path, double epsilon) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read dataset file " + path);
  return read_dataset_csv(in, epsilon);
}

}  // namespace ddsafe::consistency
