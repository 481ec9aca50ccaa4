#pragma once

// Adaptive time stepping with the two-factor search:
//
//   m := 1; Q := Q0; mesh = [0, tau_init]
//   while mesh(m) < T
//     if (m = 2 && Q = Q0) Q := Q1 else m := m + 1
//     flag := 0
//     while mesh(m) - mesh(m-1) > tau_min
//       solve on [mesh(m-1), mesh(m)]; sample residual
//       if pass
//         if mesh(m) >= T: break
//         if flag = 2: mesh(m+1) := min(mesh(m) + tau, T); break
//         stash; mesh(m) := min(mesh(m-1) + Q tau, T); flag := 1
//       else
//         if flag = 1: revert; mesh(m+1) := min(mesh(m) + tau, T); break
//         mesh(m) := mesh(m-1) + tau / Q; flag := 2
//     if tau < tau_min: force steps tau_min and 2 tau_min

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fracadapt/errors.hpp"
#include "fracadapt/problem.hpp"
#include "fracadapt/residual.hpp"
#include "fracadapt/spatial_fem.hpp"
#include "fracadapt/temporal_mesh.hpp"
#include "fracadapt/time_steppers.hpp"

namespace fracadapt {

struct AdaptiveConfig {
  double tau_init = std::numeric_limits<double>::quiet_NaN();  // NaN: T/2
  double tau_min = 0.0;
  double Q0 = 5.0;
  double Q1 = 1.2;
  int q0_iteration_cap = 500;
  int inner_iteration_cap = 200;
  int grid_n = 20;
  int n_cells = 10;
  /// Abort with an adaptation error beyond this many intervals or seconds (0: unlimited).
  std::size_t max_intervals = 0;
  double wall_budget = 0.0;
  CaputoOptions caputo;

  void validate(double T) const {
    if (!(Q1 > 1.0 && Q0 > Q1)) throw DomainError("adapt: need Q0 > Q1 > 1");
    if (!(tau_min >= 0.0)) throw DomainError("adapt: tau_min must be >= 0");
    if (!std::isnan(tau_init) && !(tau_init > 0.0 && tau_init <= T)) throw DomainError("adapt: need 0 < tau_init <= T");
    if (q0_iteration_cap < 1 || inner_iteration_cap < 1) throw DomainError("adapt: iteration caps must be positive");
    if (grid_n < 2) throw DomainError("adapt: grid_n must be >= 2");
  }
};

struct CostCounters {
  std::size_t interval_solves = 0;
  std::size_t caputo_evaluations = 0;
  std::size_t quadrature_calls = 0;
  std::size_t inner_iterations = 0;
  double wall_seconds = 0.0;
};

struct ErrorSample {
  double t = 0.0;
  double error = 0.0;
};

struct RunReport {
  std::string problem;
  std::string method;
  double alpha = 0.0;
  BarrierSpec barrier;
  AdaptiveConfig config;
  std::string status = "ok";  // ok | precision_error | adaptation_error
  std::string message;
  std::vector<double> mesh;
  std::vector<int> trials;  // residual evaluations per accepted interval
  std::vector<ResidualSample> residuals;
  std::vector<ErrorSample> errors;  // empty without an exact solution
  double max_error = std::numeric_limits<double>::quiet_NaN();
  CostCounters cost;

  std::size_t intervals() const { return mesh.empty() ? 0 : mesh.size() - 1; }
  bool residuals_pass() const {
    return std::all_of(residuals.begin(), residuals.end(), [](const ResidualSample& s) { return s.pass; });
  }
};

/// max_t ||U(t) - I_h u(t)|| over nodes and the given local sample points of every interval.
inline std::vector<ErrorSample> measure_errors(const TimeSolution& sol, const ProblemSpec& p,
                                               const SpatialDiscretization& space, NormKind norm,
                                               const std::vector<double>& local_points) {
  std::vector<ErrorSample> out;
  if (!p.exact) return out;
  const auto& ex = *p.exact;
  auto err_at = [&](std::size_t k, double s) {
    const double t = sol.node(k - 1) + s * sol.step(k);
    const SpatialVector u = space.interpolate([&](double x) { return ex(x, t); });
    out.push_back({t, spatial_norm(sol.value_local(k, s) - u, space, norm)});
  };
  for (std::size_t k = 1; k <= sol.intervals(); ++k) {
    for (double s : local_points) err_at(k, s);
    err_at(k, 1.0);
  }
  return out;
}

struct AdaptResult {
  TimeSolution solution;
  RunReport report;
};

class AdaptiveDriver {
 public:
  AdaptiveDriver(const ProblemSpec& problem, MethodSpec method, BarrierSpec barrier, AdaptiveConfig config)
      : problem_(problem), method_(method), barrier_(barrier), config_(config),
        space_(problem.x_bar, config.n_cells), stepper_(problem_, space_, method_, config.caputo), engine_(stepper_) {
    barrier_.validate();
    config_.validate(problem_.T);
  }

  AdaptiveDriver(const AdaptiveDriver&) = delete;
  AdaptiveDriver& operator=(const AdaptiveDriver&) = delete;

  const SpatialDiscretization& space() const noexcept { return space_; }
  const TimeStepper& stepper() const noexcept { return stepper_; }

  AdaptResult run() {
    const auto t_start = std::chrono::steady_clock::now();
    const double T = problem_.T;
    const double alpha = problem_.alpha;
    const std::vector<double> grid = sampling_points(alpha, config_.grid_n).points;
    const bool live_prof = barrier_.kind == BarrierKind::R1 && !(barrier_.tau_prof > 0.0);

    TimeSolution sol = stepper_.start();
    RunReport rep;
    rep.problem = problem_.name;
    rep.method = method_.name();
    rep.alpha = alpha;
    rep.config = config_;
    std::vector<std::vector<ResidualSample>> traces;

    double next = std::isnan(config_.tau_init) ? 0.5 * T : config_.tau_init;
    double Q = config_.Q0;
    bool first = true;  // current pass is the first visit of interval 1
    std::size_t inner = 0;
    int trials_here = 0;

    auto try_node = [&](double node) {
      sol.append(node, stepper_.solve(sol, node));
      const std::size_t k = sol.intervals();
      BarrierSpec b = barrier_;
      if (live_prof) b.tau_prof = k == 1 ? sol.step(1) : prof_;
      ++inner;
      ++trials_here;
      auto s = engine_.sample(sol, k, grid, b);
      const bool pass = std::all_of(s.begin(), s.end(), [](const ResidualSample& r) { return r.pass; });
      return std::make_pair(pass, std::move(s));
    };

    try {
      while (sol.mesh().final_time() < T) {
        const bool redo_first = sol.intervals() == 1 && Q == config_.Q0 && !first;
        std::size_t k;
        double node;
        int carried = 0;
        if (redo_first) {
          // second visit of interval 1 with the fine factor, starting from the accepted node
          Q = config_.Q1;
          node = sol.node(1);
          sol.pop();
          traces.pop_back();
          carried = rep.trials.back();
          rep.trials.pop_back();
          k = 1;
        } else {
          k = sol.intervals() + 1;
          node = next;
        }
        first = false;
        if (config_.max_intervals > 0 && k > config_.max_intervals) {
          throw AdaptationError("adapt: interval budget of " + std::to_string(config_.max_intervals) + " exceeded", k, {});
        }
        if (config_.wall_budget > 0.0 &&
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count() > config_.wall_budget) {
          throw AdaptationError("adapt: wall-time budget exceeded at t = " + std::to_string(sol.mesh().final_time()), k, {});
        }
        const double t_prev = sol.mesh().final_time();
        const int cap = (k == 1 && Q == config_.Q0) ? config_.q0_iteration_cap : config_.inner_iteration_cap;
        int flag = 0;
        int iters = 0;
        trials_here = carried;
        std::vector<double> trial_nodes;
        std::optional<std::pair<IntervalBlock, double>> stash;
        std::vector<ResidualSample> stash_trace;
        std::vector<ResidualSample> accepted_trace;
        bool accepted = false;

        while (node - t_prev > config_.tau_min) {
          if (++iters > cap) {
            throw AdaptationError("adapt: interval " + std::to_string(k) + " did not settle within " +
                                      std::to_string(cap) + " iterations",
                                  k, trial_nodes);
          }
          check_step(t_prev, node - t_prev);
          trial_nodes.push_back(node);
          auto [pass, trace] = try_node(node);
          const double tau = node - t_prev;
          if (pass) {
            if (node >= T) { accepted_trace = std::move(trace); accepted = true; break; }
            if (flag == 2) {
              next = std::min(node + tau, T);
              accepted_trace = std::move(trace);
              accepted = true;
              break;
            }
            stash.emplace(sol.block(k), node);
            stash_trace = std::move(trace);
            sol.pop();
            node = std::min(t_prev + Q * tau, T);
            flag = 1;
          } else {
            sol.pop();
            if (flag == 1) {
              sol.append(stash->second, std::move(stash->first));
              next = std::min(stash->second + (stash->second - t_prev), T);
              accepted_trace = std::move(stash_trace);
              accepted = true;
              break;
            }
            node = t_prev + tau / Q;
            flag = 2;
          }
        }
        if (!accepted) {
          // step fell to tau_min: force tau_min and propose 2 tau_min
          node = std::min(t_prev + config_.tau_min, T);
          check_step(t_prev, node - t_prev);
          auto [pass, trace] = try_node(node);
          (void)pass;
          accepted_trace = std::move(trace);
          next = std::min(t_prev + 2.0 * config_.tau_min, T);
        }
        if (k == 1 && live_prof) prof_ = sol.step(1);
        traces.push_back(std::move(accepted_trace));
        rep.trials.push_back(trials_here);
      }
    } catch (const PrecisionError& e) {
      rep.status = "precision_error";
      rep.message = e.what();
    } catch (const AdaptationError& e) {
      rep.status = "adaptation_error";
      rep.message = e.what();
    }

    rep.barrier = barrier_;
    if (live_prof && sol.intervals() > 0) rep.barrier.tau_prof = prof_;
    rep.mesh = sol.mesh().nodes();
    for (auto& tr : traces) rep.residuals.insert(rep.residuals.end(), tr.begin(), tr.end());
    rep.errors = measure_errors(sol, problem_, space_, barrier_.norm, grid);
    if (!rep.errors.empty()) {
      rep.max_error = 0.0;
      for (const auto& e : rep.errors) rep.max_error = std::max(rep.max_error, e.error);
    }
    const CaputoCounters cc = stepper_.caputo().counters();
    rep.cost.interval_solves = stepper_.solves();
    rep.cost.caputo_evaluations = cc.evaluations;
    rep.cost.quadrature_calls = cc.quadrature_calls;
    rep.cost.inner_iterations = inner;
    rep.cost.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(sol), std::move(rep)};
  }

 private:
  void check_step(double t_prev, double tau) const {
    if (!(tau > 0.0) || tau < std::numeric_limits<double>::min() || t_prev + tau == t_prev) {
      throw PrecisionError("adapt: time step " + std::to_string(tau) + " after t = " + std::to_string(t_prev) +
                               " is not representable in double precision (alpha = " +
                               std::to_string(problem_.alpha) + ", TOL = " + std::to_string(barrier_.TOL) + ")",
                           problem_.alpha, barrier_.TOL);
    }
  }

  ProblemSpec problem_;
  MethodSpec method_;
  BarrierSpec barrier_;
  AdaptiveConfig config_;
  SpatialDiscretization space_;
  TimeStepper stepper_;
  ResidualEngine engine_;
  double prof_ = std::numeric_limits<double>::quiet_NaN();
};

inline AdaptResult adapt_solve(const ProblemSpec& problem, MethodSpec method, BarrierSpec barrier,
                               AdaptiveConfig config = {}) {
  AdaptiveDriver d(problem, method, barrier, config);
  return d.run();
}

}  // namespace fracadapt
