#pragma once

// One-interval solvers. Every method enforces the weak equations
//   M D^alpha u_h(t) + A u_h(t) = b(t),   b_i(t) = int f(x,t) phi_i dx,
// at its enforcement points: t_k for L1 and L1-2, t_{k-1} + c_l tau_k for Coll(m).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "fracadapt/caputo.hpp"
#include "fracadapt/errors.hpp"
#include "fracadapt/problem.hpp"
#include "fracadapt/spatial_fem.hpp"
#include "fracadapt/time_solution.hpp"

namespace fracadapt {

class TimeStepper {
 public:
  TimeStepper(const ProblemSpec& problem, const SpatialDiscretization& space, MethodSpec method,
              CaputoOptions copts = {})
      : problem_(problem), space_(space), method_(method), caputo_(problem.alpha, copts) {
    if (!problem_.f || !problem_.u0) throw PreconditionError("TimeStepper: problem needs f and u0");
    if (std::abs(space_.x_bar() - problem_.x_bar) > 1e-14 * problem_.x_bar) {
      throw PreconditionError("TimeStepper: spatial domain does not match the problem");
    }
    coll_points_ = method_.collocation_points();
    coll_table_ = SingularTable(method_.m, problem_.alpha, coll_points_);
  }

  const ProblemSpec& problem() const noexcept { return problem_; }
  const SpatialDiscretization& space() const noexcept { return space_; }
  const MethodSpec& method() const noexcept { return method_; }
  const CaputoEvaluator& caputo() const noexcept { return caputo_; }
  std::size_t solves() const noexcept { return solves_; }

  /// Initial data interpolated at the dofs.
  TimeSolution start() const { return TimeSolution(method_, space_.interpolate(problem_.u0)); }

  SpatialVector load(double t) const {
    return space_.load([&](double x) { return problem_.f(x, t); });
  }

  /// L2 projection of f(., t).
  SpatialVector projected_f(double t) const { return space_.mass_factor().solve(load(t)); }

  /// Discrete L u0: projection of the supplied L u0, otherwise M^{-1} A u0.
  SpatialVector l_u0(const TimeSolution& sol) const {
    if (problem_.Lu0) return space_.project(*problem_.Lu0);
    return space_.mass_factor().solve(space_.stiffness() * sol.initial());
  }

  /// Block for the interval [t_{K}, t_k] following the last stored interval.
  IntervalBlock solve(const TimeSolution& sol, double t_k) const {
    const std::size_t k = sol.intervals() + 1;
    const double t0 = sol.mesh().final_time();
    const double tau = t_k - t0;
    if (!(tau > 0.0)) throw PreconditionError("step: t_k must exceed the last node");
    if (sol.method().kind != method_.kind || sol.method().m != method_.m) {
      throw PreconditionError("step: solution and stepper use different methods");
    }
    ++solves_;
    if (method_.kind == MethodKind::L1 || (method_.kind == MethodKind::L12 && k == 1)) return solve_l1(sol, k, tau);
    if (method_.kind == MethodKind::L12) return solve_l12(sol, k, tau);
    return solve_coll(sol, k, tau);
  }

  /// Appends interval k = sol.intervals() + 1 ending at t_k.
  void advance(TimeSolution& sol, double t_k) const { sol.append(t_k, solve(sol, t_k)); }

  /// Local enforcement points of interval k.
  std::vector<double> enforcement_points() const {
    if (method_.kind == MethodKind::Coll) return {coll_points_.begin() + 1, coll_points_.end()};
    return {1.0};
  }

  /// ||D^alpha u_h + M^{-1}(A u_h - b)|| at the enforcement points of interval k.
  std::vector<double> residual_at_enforcement_points(const TimeSolution& sol, std::size_t k,
                                                     NormKind norm = NormKind::L2) const {
    const std::vector<double> pts = enforcement_points();
    const Eigen::MatrixXd D = caputo_.at_local(sol, k, pts);
    std::vector<double> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double t = sol.node(k - 1) + pts[i] * sol.step(k);
      const SpatialVector u = sol.value_local(k, pts[i]);
      const SpatialVector r = D.col(static_cast<Eigen::Index>(i)) +
                              space_.mass_factor().solve(space_.stiffness() * u - load(t));
      out.push_back(spatial_norm(r, space_, norm));
    }
    return out;
  }

 private:
  static SpatialVector spd_solve(const Eigen::MatrixXd& K, const SpatialVector& rhs) {
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success) throw SolverError("step: system matrix is not positive definite");
    SpatialVector x = llt.solve(rhs);
    if (!x.allFinite()) throw SolverError("step: non-finite solution");
    return x;
  }

  IntervalBlock solve_l1(const TimeSolution& sol, std::size_t k, double tau) const {
    const double alpha = problem_.alpha;
    const double t_k = sol.mesh().final_time() + tau;
    const std::array<double, 1> one = {1.0};
    const SpatialVector H = caputo_.history(sol, k, tau, one).col(0);
    const double nu = std::pow(tau, -alpha) / gamma(2.0 - alpha);
    const Eigen::MatrixXd& M = space_.mass();
    const SpatialVector& U0 = sol.node_value(k - 1);
    const SpatialVector rhs = load(t_k) - M * (caputo_.inv_gamma() * H - nu * U0);
    IntervalBlock b;
    b.coeffs = {U0, spd_solve(nu * M + space_.stiffness(), rhs)};
    return b;
  }

  // u_h on interval k is U_{k-1} psi^0 + U_k psi^2 + U^1 psi^1 with U^1 = -y_k tau_k^2,
  // y_k = ((U_k - U_{k-1})/tau_k - s_{k-1}) / (tau_k + tau_{k-1}).
  IntervalBlock solve_l12(const TimeSolution& sol, std::size_t k, double tau) const {
    const double alpha = problem_.alpha;
    const double t_k = sol.mesh().final_time() + tau;
    const double tau_prev = sol.step(k - 1);
    const std::array<double, 1> one = {1.0};
    const SpatialVector H = caputo_.history(sol, k, tau, one).col(0);
    const SpatialVector& U0 = sol.node_value(k - 1);
    const SpatialVector slope = (U0 - sol.node_value(k - 2)) / tau_prev;
    const double rho = tau / (tau + tau_prev);
    const double i1 = i_sing(1, 2, alpha, 1.0);
    const double i2 = i_sing(2, 2, alpha, 1.0);
    const double g = caputo_.inv_gamma() * std::pow(tau, -alpha);
    const double c = g * (i2 - rho * i1);
    const Eigen::MatrixXd& M = space_.mass();
    const SpatialVector rhs =
        load(t_k) - M * (caputo_.inv_gamma() * H - c * U0 + g * rho * tau * i1 * slope);
    const SpatialVector Uk = spd_solve(c * M + space_.stiffness(), rhs);
    IntervalBlock b;
    b.y = ((Uk - U0) / tau - slope) / (tau + tau_prev);
    b.coeffs = {U0, -(tau * tau) * b.y, Uk};
    return b;
  }

  IntervalBlock solve_coll(const TimeSolution& sol, std::size_t k, double tau) const {
    const int m = method_.m;
    const double alpha = problem_.alpha;
    const double t_prev = sol.mesh().final_time();
    const Eigen::Index n = static_cast<Eigen::Index>(sol.dofs());
    const std::vector<double> pts(coll_points_.begin() + 1, coll_points_.end());
    const Eigen::MatrixXd H = caputo_.history(sol, k, tau, pts);
    const double g = caputo_.inv_gamma() * std::pow(tau, -alpha);
    const Eigen::MatrixXd& M = space_.mass();
    const Eigen::MatrixXd& A = space_.stiffness();
    const SpatialVector& U0 = sol.node_value(k - 1);
    const SpatialVector MU0 = M * U0;
    const SpatialVector AU0 = A * U0;

    Eigen::MatrixXd K(m * n, m * n);
    Eigen::VectorXd rhs(m * n);
    for (int r = 1; r <= m; ++r) {
      const double c = coll_points_[static_cast<std::size_t>(r)];
      for (int l = 1; l <= m; ++l) {
        K.block((r - 1) * n, (l - 1) * n, n, n) = (g * coll_table_.values(l, r)) * M + basis::psi(l, m, c) * A;
      }
      rhs.segment((r - 1) * n, n) = load(t_prev + c * tau) - caputo_.inv_gamma() * (M * H.col(r - 1)) -
                                    (g * coll_table_.values(0, r)) * MU0 - basis::psi(0, m, c) * AU0;
    }
    Eigen::VectorXd x;
    if (m == 1) {
      x = spd_solve(K, rhs);
    } else {
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
      x = lu.solve(rhs);
      if (!x.allFinite()) throw SolverError("step: singular collocation system");
    }
    IntervalBlock b;
    b.coeffs.reserve(static_cast<std::size_t>(m) + 1);
    b.coeffs.push_back(U0);
    for (int l = 1; l <= m; ++l) b.coeffs.emplace_back(x.segment((l - 1) * n, n));
    return b;
  }

  const ProblemSpec& problem_;
  const SpatialDiscretization& space_;
  MethodSpec method_;
  CaputoEvaluator caputo_;
  std::vector<double> coll_points_;
  SingularTable coll_table_;
  mutable std::size_t solves_ = 0;
};

}  // namespace fracadapt
