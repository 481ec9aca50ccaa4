#pragma once

// Residual R_h = D^alpha u_h + L u_h - f sampled through the interpolation
// identity R_h = G - I_k[G] + R_h^I with G = D^alpha u_h - P f, where I_k
// interpolates at the method's own nodes. R_h vanishes at all enforcement
// points, so R_h^I only carries R_h(0) = P(L u0 - f(0)).

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "fracadapt/caputo.hpp"
#include "fracadapt/errors.hpp"
#include "fracadapt/special_functions.hpp"
#include "fracadapt/temporal_mesh.hpp"
#include "fracadapt/time_steppers.hpp"

namespace fracadapt {

enum class BarrierKind { R0, R1 };

struct BarrierSpec {
  BarrierKind kind = BarrierKind::R0;
  double lambda = 0.0;
  double omega = 0.0;
  /// Profile parameter for R1; NaN means "not yet fixed".
  double tau_prof = std::numeric_limits<double>::quiet_NaN();
  double TOL = 1e-3;
  NormKind norm = NormKind::Linf;

  void validate() const {
    if (!(lambda >= 0.0)) throw DomainError("barrier: lambda must be >= 0");
    if (!(omega >= 0.0)) throw DomainError("barrier: omega must be >= 0");
    if (omega > 0.0 && norm != NormKind::Linf) throw DomainError("barrier: omega > 0 requires the Linf norm");
    if (!(TOL > 0.0)) throw DomainError("barrier: TOL must be > 0");
  }
};

/// rho(s) = s^{-beta} [1 - ((1-s)^+)^beta].
inline double barrier_rho(double s, double beta) {
  if (!(s > 0.0)) throw DomainError("rho: s must be positive");
  if (s >= 1.0) return std::pow(s, -beta);
  return -std::pow(s, -beta) * std::expm1(beta * std::log1p(-s));
}

inline double barrier(const BarrierSpec& spec, double alpha, double t) {
  if (!(t > 0.0)) throw DomainError("barrier: t must be positive");
  const double ig = 1.0 / gamma(1.0 - alpha);
  if (spec.kind == BarrierKind::R0) return ig * std::pow(t, -alpha) + spec.lambda;
  const double tp = spec.tau_prof;
  if (!(tp > 0.0)) throw DomainError("barrier: R1 needs tau_prof > 0");
  return ig * barrier_rho(tp / t, 1.0 - alpha) / t + spec.lambda * std::pow(std::max(tp, t), alpha - 1.0);
}

inline double barrier_threshold(const BarrierSpec& spec, double alpha, double t) {
  return spec.TOL * barrier(spec, alpha, t) / (1.0 + spec.omega);
}

struct ResidualSample {
  double t = 0.0;
  double norm = 0.0;
  double barrier = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

class ResidualEngine {
 public:
  explicit ResidualEngine(const TimeStepper& stepper) : st_(stepper) {}

  /// R_h at local points s in [0,1] of interval k, one column per point.
  Eigen::MatrixXd residual_vectors(const TimeSolution& sol, std::size_t k, const std::vector<double>& s) const {
    const MethodSpec& ms = sol.method();
    const double t0 = sol.node(k - 1);
    const double tau = sol.step(k);
    const CaputoEvaluator& cap = st_.caputo();

    // interpolation nodes (local coordinates) and G at those nodes
    std::vector<double> nodes;
    if (ms.kind == MethodKind::Coll) nodes = ms.collocation_points();
    else if (ms.kind == MethodKind::L12 && k >= 2) nodes = {-sol.step(k - 1) / tau, 0.0, 1.0};
    else nodes = {0.0, 1.0};
    const bool backward = nodes.front() < 0.0;

    std::vector<double> pts;  // local points of interval k needing D^alpha u_h
    for (double v : nodes) if (v >= 0.0) pts.push_back(v);
    const std::size_t n_nodes_here = pts.size();
    pts.insert(pts.end(), s.begin(), s.end());
    const Eigen::MatrixXd D = cap.at_local(sol, k, pts);

    const Eigen::Index n = static_cast<Eigen::Index>(sol.dofs());
    Eigen::MatrixXd Gn(n, static_cast<Eigen::Index>(nodes.size()));
    std::size_t col = 0;
    bool zero_node = false;  // is t = 0 an interpolation node?
    std::size_t zero_index = 0;
    if (backward) {
      const double tb = sol.node(k - 2);
      if (k == 2) {
        Gn.col(0) = -st_.projected_f(0.0);  // D^alpha u_h(0) = 0
        zero_node = true;
        zero_index = 0;
      } else {
        const std::array<double, 1> left = {0.0};
        Gn.col(0) = cap.at_local(sol, k - 1, left).col(0) - st_.projected_f(tb);
      }
      col = 1;
    } else if (k == 1) {
      zero_node = true;
      zero_index = 0;
    }
    for (std::size_t i = 0; i < n_nodes_here; ++i, ++col) {
      Gn.col(static_cast<Eigen::Index>(col)) = D.col(static_cast<Eigen::Index>(i)) - st_.projected_f(t0 + pts[i] * tau);
    }
    SpatialVector R0;
    if (zero_node) R0 = st_.l_u0(sol) - st_.projected_f(0.0);

    Eigen::MatrixXd out(n, static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double si = s[i];
      const double t = t0 + si * tau;
      const std::vector<double> L = basis::lagrange(nodes, si);
      SpatialVector r = D.col(static_cast<Eigen::Index>(n_nodes_here + i)) - st_.projected_f(t);
      for (std::size_t j = 0; j < nodes.size(); ++j) r -= L[j] * Gn.col(static_cast<Eigen::Index>(j));
      if (zero_node) r += L[zero_index] * R0;
      out.col(static_cast<Eigen::Index>(i)) = r;
    }
    return out;
  }

  std::vector<ResidualSample> sample(const TimeSolution& sol, std::size_t k, const std::vector<double>& s,
                                     const BarrierSpec& spec) const {
    const Eigen::MatrixXd R = residual_vectors(sol, k, s);
    const double alpha = st_.problem().alpha;
    std::vector<ResidualSample> out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      ResidualSample rs;
      rs.t = sol.node(k - 1) + s[i] * sol.step(k);
      rs.norm = spatial_norm(R.col(static_cast<Eigen::Index>(i)), st_.space(), spec.norm);
      rs.barrier = barrier(spec, alpha, rs.t);
      rs.threshold = spec.TOL * rs.barrier / (1.0 + spec.omega);
      rs.pass = std::isfinite(rs.norm) && rs.norm <= rs.threshold;
      out.push_back(rs);
    }
    return out;
  }

 private:
  const TimeStepper& st_;
};

inline void write_residual_csv(std::ostream& os, const std::vector<ResidualSample>& samples) {
  os << "t,norm,threshold,pass\n" << std::setprecision(17);
  for (const auto& s : samples) os << s.t << ',' << s.norm << ',' << s.threshold << ',' << (s.pass ? 1 : 0) << '\n';
}

}  // namespace fracadapt
