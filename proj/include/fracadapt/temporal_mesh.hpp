#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fracadapt/errors.hpp"

namespace fracadapt {

/// Strictly increasing time nodes 0 = t_0 < t_1 < ... < t_M.
class TemporalMesh {
 public:
  TemporalMesh() : nodes_{0.0} {}
  explicit TemporalMesh(std::vector<double> nodes) : nodes_(std::move(nodes)) { validate(); }

  std::size_t intervals() const noexcept { return nodes_.size() - 1; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double node(std::size_t k) const { return nodes_.at(k); }
  double final_time() const noexcept { return nodes_.back(); }
  /// Width of interval k (1-based), t_k - t_{k-1}.
  double step(std::size_t k) const { return nodes_.at(k) - nodes_.at(k - 1); }

  /// Interval k with t in (t_{k-1}, t_k]; 0 for t = 0.
  std::size_t locate(double t) const {
    if (t < 0.0 || t > nodes_.back()) throw DomainError("TemporalMesh::locate: t outside [0, T]");
    if (t == 0.0) return 0;
    const auto it = std::lower_bound(nodes_.begin() + 1, nodes_.end(), t);
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  void push_back(double t) {
    if (!(t > nodes_.back())) throw PreconditionError("TemporalMesh: nodes must increase strictly");
    nodes_.push_back(t);
  }

 private:
  void validate() const {
    if (nodes_.empty() || nodes_.front() != 0.0) throw PreconditionError("TemporalMesh: t_0 must be 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
      if (!(nodes_[i] > nodes_[i - 1])) throw PreconditionError("TemporalMesh: nodes must increase strictly");
    }
  }

  std::vector<double> nodes_;
};

/// Graded local sampling points (i/n)^p, i = 1..n-1, on (0,1).
struct SamplingGrid {
  int n = 20;
  double p = 1.0;
  std::vector<double> points;
};

inline SamplingGrid sampling_points(double alpha, int n = 20) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("sampling_points: alpha must be in (0,1)");
  if (n < 2) throw DomainError("sampling_points: n must be >= 2");
  SamplingGrid g;
  g.n = n;
  g.p = std::min(1.0 / (1.0 - alpha), 5.0);
  g.points.reserve(static_cast<std::size_t>(n - 1));
  for (int i = 1; i < n; ++i) {
    g.points.push_back(std::pow(static_cast<double>(i) / n, g.p));
  }
  return g;
}

/// t_j = T (j/M)^r; r = 1 gives the uniform mesh.
inline TemporalMesh graded_mesh(int M, double r, double T) {
  if (M < 1 || !(r >= 1.0) || !(T > 0.0)) throw DomainError("graded_mesh: need M >= 1, r >= 1, T > 0");
  std::vector<double> t(static_cast<std::size_t>(M) + 1);
  for (int j = 0; j <= M; ++j) t[static_cast<std::size_t>(j)] = T * std::pow(static_cast<double>(j) / M, r);
  t.back() = T;
  return TemporalMesh(std::move(t));
}

inline TemporalMesh uniform_mesh(int M, double T) { return graded_mesh(M, 1.0, T); }

/// One node per line, 17 significant digits.
inline void write_mesh_csv(std::ostream& os, const TemporalMesh& mesh) {
  os << "t\n" << std::setprecision(17);
  for (double t : mesh.nodes()) os << t << '\n';
}

inline TemporalMesh read_mesh_csv(std::istream& is) {
  std::string line;
  std::vector<double> nodes;
  while (std::getline(is, line)) {
    if (line.empty() || line == "t") continue;
    nodes.push_back(std::stod(line));
  }
  return TemporalMesh(std::move(nodes));
}

}  // namespace fracadapt
