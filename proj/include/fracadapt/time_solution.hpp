#pragma once

// Continuous piecewise-polynomial-in-time solutions.
//
// Every interval is stored in the hierarchical reference basis on [0,1]
//   psi^0 = 1 - s,  psi^m = s,  psi^l = s^l (1 - s)  (0 < l < m),
// so U^0 and U^m are the values at the interval ends. The L1-2 quadratic
// U_{k-1} phi^0 + U_k phi^1 + y_k (t - t_{k-1})(t - t_k) has U^1 = -y_k tau_k^2.

#include <cstddef>
#include <string>
#include <vector>

#include "fracadapt/errors.hpp"
#include "fracadapt/spatial_fem.hpp"
#include "fracadapt/temporal_mesh.hpp"

namespace fracadapt {

enum class MethodKind { L1, L12, Coll };

struct MethodSpec {
  MethodKind kind = MethodKind::L1;
  int m = 1;  // collocation degree; 1 for L1, 2 for L1-2

  static MethodSpec l1() { return {MethodKind::L1, 1}; }
  static MethodSpec l12() { return {MethodKind::L12, 2}; }
  static MethodSpec coll(int m) {
    if (m < 1 || m > 12) throw DomainError("coll: m must be in [1, 12]");
    return {MethodKind::Coll, m};
  }

  /// Polynomial degree on interval k (L1-2 is linear on the first interval).
  int degree(std::size_t k) const {
    if (kind == MethodKind::L1) return 1;
    if (kind == MethodKind::L12) return k == 1 ? 1 : 2;
    return m;
  }

  /// Collocation fractions c_l = l/m.
  std::vector<double> collocation_points() const {
    std::vector<double> c(static_cast<std::size_t>(m) + 1);
    for (int l = 0; l <= m; ++l) c[static_cast<std::size_t>(l)] = static_cast<double>(l) / m;
    c.back() = 1.0;
    return c;
  }

  /// Convergence order q of the method (error ~ M^{-(q - alpha)}).
  int order() const {
    switch (kind) {
      case MethodKind::L1: return 2;
      case MethodKind::L12: return 3;
      case MethodKind::Coll: return m + 1;
    }
    return 0;
  }

  std::string name() const {
    switch (kind) {
      case MethodKind::L1: return "l1";
      case MethodKind::L12: return "l12";
      case MethodKind::Coll: return "coll" + std::to_string(m);
    }
    return "?";
  }
};

/// Reference basis helpers for the hierarchical family of degree m.
namespace basis {

inline double psi(int l, int m, double s) {
  if (l == 0) return 1.0 - s;
  if (l == m) return s;
  double p = 1.0;
  for (int i = 0; i < l; ++i) p *= s;
  return p * (1.0 - s);
}

inline double dpsi(int l, int m, double s) {
  if (l == 0) return -1.0;
  if (l == m) return 1.0;
  double p = 1.0;  // s^(l-1)
  for (int i = 0; i < l - 1; ++i) p *= s;
  return l * p * (1.0 - s) - p * s;
}

/// Lagrange basis through arbitrary distinct nodes, evaluated at s.
inline std::vector<double> lagrange(const std::vector<double>& nodes, double s) {
  std::vector<double> L(nodes.size(), 1.0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (i != j) L[i] *= (s - nodes[j]) / (nodes[i] - nodes[j]);
    }
  }
  return L;
}

}  // namespace basis

struct IntervalBlock {
  std::vector<SpatialVector> coeffs;  // U^0 .. U^degree
  SpatialVector y;                    // L1-2 divided difference (empty otherwise)

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  const SpatialVector& left() const { return coeffs.front(); }
  const SpatialVector& right() const { return coeffs.back(); }
};

class TimeSolution {
 public:
  TimeSolution(MethodSpec method, SpatialVector u0)
      : method_(method), u0_(std::move(u0)), n_(static_cast<std::size_t>(u0_.size())) {}

  const MethodSpec& method() const noexcept { return method_; }
  const TemporalMesh& mesh() const noexcept { return mesh_; }
  std::size_t intervals() const noexcept { return blocks_.size(); }
  std::size_t dofs() const noexcept { return n_; }
  const SpatialVector& initial() const noexcept { return u0_; }
  const IntervalBlock& block(std::size_t k) const { return blocks_.at(k - 1); }
  double node(std::size_t k) const { return mesh_.node(k); }
  double step(std::size_t k) const { return mesh_.step(k); }

  /// Value at t_k (u0 for k = 0).
  const SpatialVector& node_value(std::size_t k) const {
    return k == 0 ? u0_ : blocks_.at(k - 1).right();
  }

  void append(double t_k, IntervalBlock b) {
    const std::size_t k = blocks_.size() + 1;
    if (b.degree() != method_.degree(k)) throw PreconditionError("append: block degree does not match method");
    for (const auto& c : b.coeffs) {
      if (static_cast<std::size_t>(c.size()) != n_) throw PreconditionError("append: block size mismatch");
      if (!c.allFinite()) throw SolverError("append: non-finite coefficients");
    }
    if ((b.left() - node_value(k - 1)).lpNorm<Eigen::Infinity>() != 0.0) {
      throw PreconditionError("append: block violates continuity at t_{k-1}");
    }
    mesh_.push_back(t_k);
    // history caches: endpoint derivative p'(1) and interior coefficients
    const int d = b.degree();
    SpatialVector dend = b.right() - b.left();
    for (int l = 1; l < d; ++l) dend -= b.coeffs[static_cast<std::size_t>(l)];
    deriv_.insert(deriv_.end(), dend.data(), dend.data() + n_);
    const int stride = interior_stride();
    for (int l = 1; l <= stride; ++l) {
      if (l < d) {
        const SpatialVector& c = b.coeffs[static_cast<std::size_t>(l)];
        interior_.insert(interior_.end(), c.data(), c.data() + n_);
      } else {
        interior_.insert(interior_.end(), n_, 0.0);
      }
    }
    blocks_.push_back(std::move(b));
  }

  void pop() {
    if (blocks_.empty()) throw PreconditionError("pop: no interval to remove");
    blocks_.pop_back();
    std::vector<double> nodes = mesh_.nodes();
    nodes.pop_back();
    mesh_ = TemporalMesh(std::move(nodes));
    deriv_.resize(deriv_.size() - n_);
    interior_.resize(interior_.size() - n_ * static_cast<std::size_t>(interior_stride()));
  }

  /// u_h(t) for t in [0, t_K].
  SpatialVector value(double t) const {
    const std::size_t k = mesh_.locate(t);
    if (k == 0) return u0_;
    const double s = (t - mesh_.node(k - 1)) / mesh_.step(k);
    return value_local(k, s);
  }

  SpatialVector value_local(std::size_t k, double s) const {
    const IntervalBlock& b = block(k);
    const int d = b.degree();
    SpatialVector v = SpatialVector::Zero(static_cast<Eigen::Index>(n_));
    for (int l = 0; l <= d; ++l) v += basis::psi(l, d, s) * b.coeffs[static_cast<std::size_t>(l)];
    return v;
  }

  /// Column-major n x K matrix of p_j'(1) for every stored interval j.
  const std::vector<double>& endpoint_derivatives() const noexcept { return deriv_; }
  /// Column-major n x (K * stride) matrix of interior hierarchical coefficients.
  const std::vector<double>& interior_coefficients() const noexcept { return interior_; }
  int interior_stride() const noexcept { return method_.kind == MethodKind::Coll ? method_.m - 1 : (method_.kind == MethodKind::L12 ? 1 : 0); }

 private:
  MethodSpec method_;
  SpatialVector u0_;
  std::size_t n_;
  TemporalMesh mesh_;
  std::vector<IntervalBlock> blocks_;
  std::vector<double> deriv_;
  std::vector<double> interior_;
};

}  // namespace fracadapt
