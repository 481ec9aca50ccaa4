#pragma once

// Piecewise-quadratic Lagrange finite elements on a uniform grid of (0, x_bar)
// with homogeneous Dirichlet conditions. Degrees of freedom are ordered by
// coordinate: interior dof i sits at x = (i + 1) * h / 2.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

#include "fracadapt/errors.hpp"

namespace fracadapt {

using SpatialVector = Eigen::VectorXd;

class SpatialDiscretization {
 public:
  SpatialDiscretization(double x_bar, int n_cells) : x_bar_(x_bar), n_cells_(n_cells) {
    if (!(x_bar > 0.0)) throw DomainError("assemble: x_bar must be positive");
    if (n_cells < 2) throw DomainError("assemble: need at least 2 cells");
    h_ = x_bar / n_cells;
    const int n = dofs();
    coords_.resize(n);
    for (int i = 0; i < n; ++i) coords_[i] = 0.5 * h_ * (i + 1);

    // exact element integrals for the quadratic Lagrange basis
    const double me[3][3] = {{4, 2, -1}, {2, 16, 2}, {-1, 2, 4}};
    const double ke[3][3] = {{7, -8, 1}, {-8, 16, -8}, {1, -8, 7}};
    mass_ = Eigen::MatrixXd::Zero(n, n);
    stiff_ = Eigen::MatrixXd::Zero(n, n);
    for (int e = 0; e < n_cells; ++e) {
      for (int a = 0; a < 3; ++a) {
        const int ia = interior_index(2 * e + a);
        if (ia < 0) continue;
        for (int b = 0; b < 3; ++b) {
          const int ib = interior_index(2 * e + b);
          if (ib < 0) continue;
          mass_(ia, ib) += h_ * me[a][b] / 30.0;
          stiff_(ia, ib) += ke[a][b] / (3.0 * h_);
        }
      }
    }
    mass_llt_.compute(mass_);
  }

  double x_bar() const noexcept { return x_bar_; }
  int cells() const noexcept { return n_cells_; }
  double cell_width() const noexcept { return h_; }
  int dofs() const noexcept { return 2 * n_cells_ - 1; }
  const Eigen::VectorXd& coordinates() const noexcept { return coords_; }
  const Eigen::MatrixXd& mass() const noexcept { return mass_; }
  const Eigen::MatrixXd& stiffness() const noexcept { return stiff_; }
  const Eigen::LLT<Eigen::MatrixXd>& mass_factor() const noexcept { return mass_llt_; }

  /// Nodal interpolation at the interior dofs.
  template <class G>
  SpatialVector interpolate(G&& g) const {
    SpatialVector v(dofs());
    for (int i = 0; i < dofs(); ++i) v[i] = g(coords_[i]);
    return v;
  }

  /// Load vector b_i = int g phi_i dx (5-point Gauss per cell).
  template <class G>
  SpatialVector load(G&& g) const {
    static constexpr std::array<double, 5> xq = {
        0.04691007703066800, 0.23076534494715845, 0.5, 0.76923465505284155, 0.95308992296933200};
    static constexpr std::array<double, 5> wq = {
        0.11846344252809454, 0.23931433524968324, 0.28444444444444444, 0.23931433524968324,
        0.11846344252809454};
    SpatialVector b = SpatialVector::Zero(dofs());
    for (int e = 0; e < n_cells_; ++e) {
      for (std::size_t q = 0; q < xq.size(); ++q) {
        const double xi = xq[q];
        const double gv = g(h_ * (e + xi)) * wq[q] * h_;
        const std::array<double, 3> N = shape(xi);
        for (int a = 0; a < 3; ++a) {
          const int ia = interior_index(2 * e + a);
          if (ia >= 0) b[ia] += gv * N[a];
        }
      }
    }
    return b;
  }

  /// L2 projection onto the discrete space: M^{-1} load(g).
  template <class G>
  SpatialVector project(G&& g) const {
    return mass_llt_.solve(load(std::forward<G>(g)));
  }

  /// Value of the finite element function at x.
  double evaluate(const SpatialVector& v, double x) const {
    check(v);
    if (x <= 0.0 || x >= x_bar_) return 0.0;
    int e = std::min(static_cast<int>(x / h_), n_cells_ - 1);
    const double xi = x / h_ - e;
    const std::array<double, 3> N = shape(xi);
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
      const int ia = interior_index(2 * e + a);
      if (ia >= 0) s += N[a] * v[ia];
    }
    return s;
  }

  void check(const SpatialVector& v) const {
    if (v.size() != dofs()) throw PreconditionError("spatial vector has wrong length");
  }

  static std::array<double, 3> shape(double xi) {
    return {(1.0 - xi) * (1.0 - 2.0 * xi), 4.0 * xi * (1.0 - xi), xi * (2.0 * xi - 1.0)};
  }

 private:
  // global dof g in 0..2n -> interior index, -1 on the boundary
  int interior_index(int g) const { return (g == 0 || g == 2 * n_cells_) ? -1 : g - 1; }

  double x_bar_;
  int n_cells_;
  double h_;
  Eigen::VectorXd coords_;
  Eigen::MatrixXd mass_;
  Eigen::MatrixXd stiff_;
  Eigen::LLT<Eigen::MatrixXd> mass_llt_;
};

inline SpatialDiscretization assemble(double x_bar, int n_cells) {
  return SpatialDiscretization(x_bar, n_cells);
}

inline double l2_norm(const SpatialVector& v, const SpatialDiscretization& d) {
  d.check(v);
  return std::sqrt(std::max(0.0, v.dot(d.mass() * v)));
}

/// max |v_h| over the 11 equispaced points (dofs included) of every cell.
inline double linf_norm(const SpatialVector& v, const SpatialDiscretization& d) {
  d.check(v);
  double m = 0.0;
  const int n = d.cells();
  for (int e = 0; e < n; ++e) {
    const double left = (e == 0) ? 0.0 : v[2 * e - 1];
    const double mid = v[2 * e];
    const double right = (e == n - 1) ? 0.0 : v[2 * e + 1];
    for (int i = 0; i <= 10; ++i) {
      const std::array<double, 3> N = SpatialDiscretization::shape(i / 10.0);
      m = std::max(m, std::abs(N[0] * left + N[1] * mid + N[2] * right));
    }
  }
  return m;
}

enum class NormKind { L2, Linf };

inline double spatial_norm(const SpatialVector& v, const SpatialDiscretization& d, NormKind k) {
  return k == NormKind::L2 ? l2_norm(v, d) : linf_norm(v, d);
}

}  // namespace fracadapt
