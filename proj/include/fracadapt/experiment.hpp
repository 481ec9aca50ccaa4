#pragma once

// Experiment runs: problem construction from a config, adaptive or fixed-mesh
// solves, guaranteed-bound checks, report files and the offline re-check of a
// stored report.

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fracadapt/adaptive_driver.hpp"
#include "fracadapt/bounds_verifier.hpp"
#include "fracadapt/builtin_problems.hpp"
#include "fracadapt/config.hpp"
#include "fracadapt/expression.hpp"

namespace fracadapt {

using json = nlohmann::json;

/// Problem description as stored in reports; enough to rebuild the ProblemSpec.
struct ProblemSource {
  std::string kind = "example1";
  double alpha = 0.4;
  double gamma = 0.0;
  double T = 1.0;
  double x_bar = 1.0;
  std::string f, u0, Lu0, exact;
};

inline ProblemSpec build_problem(const ProblemSource& s) {
  if (s.kind == "example1") return builtin_example1(s.alpha);
  if (s.kind == "example2") return builtin_example2(s.alpha, s.gamma);
  if (s.kind != "custom") throw ConfigError("unknown problem '" + s.kind + "'");
  const std::map<std::string, double> consts = {{"alpha", s.alpha}, {"T", s.T}, {"x_bar", s.x_bar}};
  ProblemSpec p;
  p.name = "custom";
  p.alpha = s.alpha;
  p.T = s.T;
  p.x_bar = s.x_bar;
  const Expression f(s.f, consts), u0(s.u0, consts);
  p.f = [f](double x, double t) { return f(x, t); };
  p.u0 = [u0](double x) { return u0(x, 0.0); };
  if (!s.Lu0.empty()) {
    const Expression l(s.Lu0, consts);
    p.Lu0 = [l](double x) { return l(x, 0.0); };
  }
  if (!s.exact.empty()) {
    const Expression e(s.exact, consts);
    p.exact = [e](double x, double t) { return e(x, t); };
  }
  return p;
}

struct RunSpec {
  std::string id;
  std::string series;
  ProblemSource source;
  MethodSpec method;
  BarrierSpec barrier;
  AdaptiveConfig adapt;
  MeshMode mesh = MeshMode::Adaptive;
  int M = 0;
  double grading = 1.0;
  bool check_error = false;
  bool check_bound = false;
  int bound_points = 100;
};

struct CheckResult {
  bool requested = false;
  bool pass = true;
  double worst_ratio = 0.0;  // max of measured / allowed
  std::string note;
};

struct RunOutcome {
  RunSpec spec;
  RunReport report;
  BoundTrace bound;
  CheckResult error_check;
  CheckResult bound_check;
  std::string dir;

  bool checks_pass() const { return error_check.pass && bound_check.pass; }
};

/// Guaranteed error profile: TOL for R0, TOL t^{alpha-1} for R1.
inline double error_profile(const BarrierSpec& b, double alpha, double t) {
  return b.kind == BarrierKind::R0 ? b.TOL : b.TOL * std::pow(t, alpha - 1.0);
}

/// Residual norms at (i/n)^p, i = 0..n, on every interval, as a
/// piecewise-linear envelope over [0, t_K].
inline Envelope residual_envelope(const ResidualEngine& eng, const TimeSolution& sol,
                                  const SpatialDiscretization& space, NormKind norm, int n, double p) {
  std::vector<double> s;
  for (int i = 0; i <= n; ++i) s.push_back(std::pow(static_cast<double>(i) / n, p));
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 1; k <= sol.intervals(); ++k) {
    const Eigen::MatrixXd R = eng.residual_vectors(sol, k, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      pts.emplace_back(sol.node(k - 1) + s[i] * sol.step(k),
                       spatial_norm(R.col(static_cast<Eigen::Index>(i)), space, norm));
    }
  }
  return make_envelope(std::move(pts));
}

/// Bound trace at the mesh nodes and the sampling points of the first
/// interval, paired with the measured errors where known.
inline BoundTrace bound_trace(const RunReport& rep, const ResidualEngine& eng, const TimeSolution& sol,
                              const SpatialDiscretization& space, int points) {
  BoundTrace tr;
  if (sol.intervals() == 0) return tr;
  const double alpha = rep.alpha;
  const Envelope env =
      residual_envelope(eng, sol, space, rep.barrier.norm, points, sampling_points(alpha).p);
  const InverseOperator op(alpha, rep.barrier.lambda, sol.mesh().final_time());
  const double c = bound_factor(rep.barrier.norm, rep.barrier.omega);
  const double t1 = sol.node(1);
  for (const auto& e : rep.errors) {
    // error samples are ordered in t; keep interval 1 and the nodes
    const bool node = std::binary_search(rep.mesh.begin(), rep.mesh.end(), e.t);
    if (e.t <= t1 || node) {
      tr.times.push_back(e.t);
      tr.errors.push_back(e.error);
    }
  }
  if (rep.errors.empty()) {
    for (double s : sampling_points(alpha).points) {
      tr.times.push_back(s * t1);
      tr.errors.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    for (std::size_t k = 1; k <= sol.intervals(); ++k) {
      tr.times.push_back(sol.node(k));
      tr.errors.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  for (double t : tr.times) tr.bounds.push_back(c * op(env, t, 1e-8));
  return tr;
}

inline CheckResult check_errors(const RunReport& rep, bool requested) {
  CheckResult c;
  c.requested = requested;
  if (!requested) return c;
  if (rep.errors.empty()) {
    c.pass = false;
    c.note = "no exact solution";
    return c;
  }
  for (const auto& e : rep.errors) {
    c.worst_ratio = std::max(c.worst_ratio, e.error / error_profile(rep.barrier, rep.alpha, e.t));
  }
  c.pass = rep.status == "ok" && c.worst_ratio <= 1.0;
  if (rep.status != "ok") c.note = "run ended with " + rep.status;
  return c;
}

inline CheckResult check_bounds(const RunReport& rep, const BoundTrace& tr, bool requested) {
  CheckResult c;
  c.requested = requested;
  if (!requested) return c;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (!(tr.bounds[i] >= 0.0)) c.pass = false;
    if (std::isfinite(tr.errors[i]) && tr.bounds[i] > 0.0) {
      c.worst_ratio = std::max(c.worst_ratio, tr.errors[i] / tr.bounds[i]);
    }
  }
  if (c.worst_ratio > 1.0) c.pass = false;
  if (rep.status != "ok") {
    c.pass = false;
    c.note = "run ended with " + rep.status;
  }
  return c;
}

/// Solves on a prescribed mesh and fills a report like the adaptive driver does.
class FixedMeshRun {
 public:
  FixedMeshRun(const ProblemSpec& p, MethodSpec method, BarrierSpec barrier, AdaptiveConfig cfg)
      : problem_(p), method_(method), barrier_(barrier), cfg_(cfg), space_(p.x_bar, cfg.n_cells),
        stepper_(problem_, space_, method_, cfg.caputo), engine_(stepper_) {
    barrier_.validate();
  }
  FixedMeshRun(const FixedMeshRun&) = delete;
  FixedMeshRun& operator=(const FixedMeshRun&) = delete;

  const SpatialDiscretization& space() const noexcept { return space_; }
  const TimeStepper& stepper() const noexcept { return stepper_; }

  AdaptResult run(const std::vector<double>& nodes) {
    const auto t0 = std::chrono::steady_clock::now();
    if (nodes.size() < 2 || nodes.front() != 0.0) throw PreconditionError("fixed mesh: need nodes 0 < t_1 < ...");
    TimeSolution sol = stepper_.start();
    RunReport rep;
    rep.problem = problem_.name;
    rep.method = method_.name();
    rep.alpha = problem_.alpha;
    rep.config = cfg_;
    rep.barrier = barrier_;
    try {
      for (std::size_t k = 1; k < nodes.size(); ++k) {
        stepper_.advance(sol, nodes[k]);
        rep.trials.push_back(1);
      }
    } catch (const std::exception& e) {
      rep.status = "solver_error";
      rep.message = e.what();
    }
    if (barrier_.kind == BarrierKind::R1 && !(rep.barrier.tau_prof > 0.0) && sol.intervals() > 0) {
      rep.barrier.tau_prof = sol.step(1);
    }
    const std::vector<double> grid = sampling_points(problem_.alpha, cfg_.grid_n).points;
    for (std::size_t k = 1; k <= sol.intervals(); ++k) {
      const auto s = engine_.sample(sol, k, grid, rep.barrier);
      rep.residuals.insert(rep.residuals.end(), s.begin(), s.end());
    }
    rep.mesh = sol.mesh().nodes();
    rep.errors = measure_errors(sol, problem_, space_, barrier_.norm, grid);
    if (!rep.errors.empty()) {
      rep.max_error = 0.0;
      for (const auto& e : rep.errors) rep.max_error = std::max(rep.max_error, e.error);
    }
    const CaputoCounters cc = stepper_.caputo().counters();
    rep.cost.interval_solves = stepper_.solves();
    rep.cost.caputo_evaluations = cc.evaluations;
    rep.cost.quadrature_calls = cc.quadrature_calls;
    rep.cost.inner_iterations = sol.intervals();
    rep.cost.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(sol), std::move(rep)};
  }

 private:
  ProblemSpec problem_;
  MethodSpec method_;
  BarrierSpec barrier_;
  AdaptiveConfig cfg_;
  SpatialDiscretization space_;
  TimeStepper stepper_;
  ResidualEngine engine_;
};

// ---------------------------------------------------------------- output

inline std::string norm_name(NormKind n) { return n == NormKind::L2 ? "L2" : "Linf"; }
inline std::string barrier_name(BarrierKind b) { return b == BarrierKind::R0 ? "R0" : "R1"; }

namespace detail {

// JSON has no NaN; unknown values are written as null
inline json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline double null_or_num(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline json check_json(const CheckResult& c) {
  return {{"requested", c.requested}, {"pass", c.pass}, {"worst_ratio", c.worst_ratio}, {"note", c.note}};
}

}  // namespace detail

inline json run_json(const RunOutcome& o) {
  using detail::num_or_null;
  const RunReport& r = o.report;
  const RunSpec& s = o.spec;
  json problem = {{"kind", s.source.kind}, {"name", r.problem}, {"alpha", s.source.alpha},
                  {"T", s.source.T},       {"x_bar", s.source.x_bar}};
  if (s.source.kind == "example2") {
    problem["gamma"] = s.source.gamma;
    problem["notes"] = "u0 = 0 (initial data not given for this example; homogeneous choice)";
  }
  if (s.source.kind == "custom") {
    problem["f"] = s.source.f;
    problem["u0"] = s.source.u0;
    problem["Lu0"] = s.source.Lu0;
    problem["exact"] = s.source.exact;
  }
  problem["exact_solution"] = !r.errors.empty() || !s.source.exact.empty() || s.source.kind == "example1";
  const AdaptiveConfig& a = s.adapt;
  json j = {
      {"schema", "fracadapt-run/1"},
      {"id", s.id},
      {"series", s.series},
      {"problem", problem},
      {"method", {{"name", s.method.name()}, {"order", s.method.order()}}},
      {"barrier",
       {{"kind", barrier_name(r.barrier.kind)},
        {"lambda", r.barrier.lambda},
        {"omega", r.barrier.omega},
        {"tau_prof", num_or_null(r.barrier.tau_prof)},
        {"TOL", r.barrier.TOL},
        {"norm", norm_name(r.barrier.norm)}}},
      {"mesh_mode", mesh_mode_name(s.mesh)},
      {"adapt",
       {{"tau_init", num_or_null(a.tau_init)},
        {"tau_min", a.tau_min},
        {"Q0", a.Q0},
        {"Q1", a.Q1},
        {"q0_iteration_cap", a.q0_iteration_cap},
        {"inner_iteration_cap", a.inner_iteration_cap},
        {"grid_n", a.grid_n},
        {"n_cells", a.n_cells},
        {"max_intervals", a.max_intervals},
        {"wall_budget", a.wall_budget}}},
      {"status", r.status},
      {"message", r.message},
      {"M", r.intervals()},
      {"first_step", r.mesh.size() > 1 ? json(r.mesh[1]) : json(nullptr)},
      {"final_time", r.mesh.empty() ? json(nullptr) : json(r.mesh.back())},
      {"residuals_pass", r.residuals_pass()},
      {"max_error", num_or_null(r.max_error)},
      {"trials", r.trials},
      {"cost",
       {{"interval_solves", r.cost.interval_solves},
        {"caputo_evaluations", r.cost.caputo_evaluations},
        {"quadrature_calls", r.cost.quadrature_calls},
        {"inner_iterations", r.cost.inner_iterations},
        {"wall_seconds", r.cost.wall_seconds}}},
      {"checks", {{"error", detail::check_json(o.error_check)}, {"bound", detail::check_json(o.bound_check)}}},
      {"bound_points", s.bound_points},
      {"files", {{"mesh", "mesh.csv"}, {"residuals", "residuals.csv"}}},
  };
  if (s.mesh != MeshMode::Adaptive) {
    j["M_requested"] = s.M;
    j["grading"] = s.grading;
  }
  if (!r.errors.empty()) j["files"]["errors"] = "errors.csv";
  if (!o.bound.times.empty()) j["files"]["bound"] = "bound.csv";
  return j;
}

inline void write_run_files(const RunOutcome& o) {
  namespace fs = std::filesystem;
  fs::create_directories(o.dir);
  const fs::path d(o.dir);
  {
    std::ofstream os(d / "mesh.csv");
    write_mesh_csv(os, TemporalMesh(o.report.mesh.empty() ? std::vector<double>{0.0} : o.report.mesh));
  }
  {
    std::ofstream os(d / "residuals.csv");
    write_residual_csv(os, o.report.residuals);
  }
  if (!o.report.errors.empty()) {
    std::ofstream os(d / "errors.csv");
    os << "t,error\n" << std::setprecision(17);
    for (const auto& e : o.report.errors) os << e.t << ',' << e.error << '\n';
  }
  if (!o.bound.times.empty()) {
    std::ofstream os(d / "bound.csv");
    write_bound_csv(os, o.bound);
  }
  std::ofstream os(d / "report.json");
  os << run_json(o).dump(2) << '\n';
}

// ---------------------------------------------------------------- runs

inline RunOutcome execute_run(const RunSpec& spec) {
  RunOutcome o;
  o.spec = spec;
  const ProblemSpec p = build_problem(spec.source);
  auto finish = [&](const AdaptResult& r, const ResidualEngine& eng, const SpatialDiscretization& space) {
    o.report = r.report;
    o.error_check = check_errors(o.report, spec.check_error);
    if (spec.check_bound) {
      o.bound = bound_trace(o.report, eng, r.solution, space, spec.bound_points);
    }
    o.bound_check = check_bounds(o.report, o.bound, spec.check_bound);
  };
  if (spec.mesh == MeshMode::Adaptive) {
    AdaptiveDriver d(p, spec.method, spec.barrier, spec.adapt);
    const AdaptResult r = d.run();
    finish(r, ResidualEngine(d.stepper()), d.space());
  } else {
    FixedMeshRun d(p, spec.method, spec.barrier, spec.adapt);
    const double r = spec.mesh == MeshMode::Uniform ? 1.0 : spec.grading;
    const AdaptResult res = d.run(graded_mesh(spec.M, r, p.T).nodes());
    finish(res, ResidualEngine(d.stepper()), d.space());
  }
  return o;
}

struct Series {
  std::string id;
  std::vector<std::size_t> runs;  // indices into the run list
};

struct Plan {
  std::vector<RunSpec> runs;
  std::vector<Series> series;
};

inline std::string fmt_g(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

/// Expands list-valued keys into series and runs.
inline Plan make_plan(const ExperimentConfig& c) {
  Plan plan;
  for (double alpha : c.alpha) {
    for (const MethodSpec& ms : c.methods) {
      for (BarrierKind bk : c.barriers) {
        for (std::size_t li = 0; li < c.lambda.size(); ++li) {
          for (double q1 : c.Q1) {
            const double lambda = c.lambda[li];
            const double omega = c.omega_auto ? lambda * c.x_bar * c.x_bar / 8.0 : c.omega[li];
            Series s;
            s.id = c.problem + "-a" + fmt_g(alpha) + "-" + ms.name() + "-" + barrier_name(bk) + "-l" + fmt_g(lambda) +
                   "-w" + fmt_g(omega);
            if (c.Q1.size() > 1) s.id += "-Q" + fmt_g(q1);
            if (c.mesh != MeshMode::Adaptive) s.id += "-" + mesh_mode_name(c.mesh);
            const std::size_t count = c.mesh == MeshMode::Adaptive ? c.tols.size() : c.M.size();
            for (std::size_t i = 0; i < count; ++i) {
              RunSpec r;
              r.series = s.id;
              r.source = {c.problem, alpha, c.gamma, c.T, c.x_bar, c.f, c.u0, c.Lu0, c.exact};
              r.method = ms;
              r.barrier.kind = bk;
              r.barrier.lambda = lambda;
              r.barrier.omega = omega;
              r.barrier.tau_prof = c.tau_prof;
              r.barrier.norm = c.norm;
              r.barrier.TOL = c.mesh == MeshMode::Adaptive ? c.tols[i] : c.tols.front();
              r.adapt = c.adapt;
              r.adapt.Q1 = q1;
              r.mesh = c.mesh;
              r.grading = c.grading;
              const bool has_exact = c.problem == "example1" || !c.exact.empty();
              r.check_error = c.check_error.value_or(has_exact) && c.mesh == MeshMode::Adaptive;
              r.check_bound = c.check_bound;
              r.bound_points = c.bound_points;
              if (c.mesh == MeshMode::Adaptive) {
                r.id = s.id + "-tol" + fmt_g(r.barrier.TOL);
              } else {
                r.M = c.M[i];
                r.id = s.id + "-M" + std::to_string(r.M);
              }
              s.runs.push_back(plan.runs.size());
              plan.runs.push_back(std::move(r));
            }
            plan.series.push_back(std::move(s));
          }
        }
      }
    }
  }
  return plan;
}

/// Least-squares slope of log(error) against log(M); NaN with fewer than two points.
inline double fit_slope(const std::vector<std::pair<double, double>>& m_err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [m, e] : m_err) {
    if (!(m > 0.0 && e > 0.0 && std::isfinite(e))) continue;
    const double x = std::log(m), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

/// Runs every planned run on `threads` workers; `log` receives one line per run.
inline std::vector<RunOutcome> execute_plan(const Plan& plan, unsigned threads,
                                            const std::function<void(const RunOutcome&)>& on_done = {}) {
  std::vector<RunOutcome> out(plan.runs.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next++;
      if (i >= plan.runs.size()) return;
      RunOutcome o;
      try {
        o = execute_run(plan.runs[i]);
      } catch (const std::exception& e) {
        o.spec = plan.runs[i];
        o.report.status = "failed";
        o.report.message = e.what();
        o.report.method = o.spec.method.name();
        o.report.alpha = o.spec.source.alpha;
        o.report.barrier = o.spec.barrier;
        o.error_check = {o.spec.check_error, !o.spec.check_error, 0.0, e.what()};
        o.bound_check = {o.spec.check_bound, !o.spec.check_bound, 0.0, e.what()};
      }
      out[i] = std::move(o);
      if (on_done) {
        std::lock_guard<std::mutex> lock(mu);
        on_done(out[i]);
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(plan.runs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

/// Writes per-run files, convergence.csv and summary.json; returns the summary.
inline json write_outputs(const std::string& out_dir, const Plan& plan, std::vector<RunOutcome>& outcomes,
                          const std::string& command) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (auto& o : outcomes) {
    o.dir = (fs::path(out_dir) / o.spec.id).string();
    write_run_files(o);
  }
  json series = json::array();
  std::ofstream conv(fs::path(out_dir) / "convergence.csv");
  conv << "series,TOL,M,error,status\n" << std::setprecision(17);
  bool all_pass = true;
  for (const auto& s : plan.series) {
    json rows = json::array();
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i : s.runs) {
      const RunOutcome& o = outcomes[i];
      all_pass = all_pass && o.checks_pass();
      const double M = static_cast<double>(o.report.intervals());
      rows.push_back({{"run", o.spec.id},
                      {"TOL", o.spec.barrier.TOL},
                      {"M", o.report.intervals()},
                      {"error", detail::num_or_null(o.report.max_error)},
                      {"status", o.report.status},
                      {"checks_pass", o.checks_pass()}});
      conv << s.id << ',' << o.spec.barrier.TOL << ',' << o.report.intervals() << ',' << o.report.max_error << ','
           << o.report.status << '\n';
      if (o.report.status == "ok") pts.emplace_back(M, o.report.max_error);
    }
    const RunSpec& first = plan.runs[s.runs.front()];
    const double expected = first.mesh == MeshMode::Uniform ? -first.source.alpha
                                                            : -(first.method.order() - first.source.alpha);
    series.push_back({{"id", s.id},
                      {"rows", rows},
                      {"slope", detail::num_or_null(fit_slope(pts))},
                      {"expected_slope", expected}});
  }
  json summary = {{"schema", "fracadapt-summary/1"},
                  {"command", command},
                  {"runs", outcomes.size()},
                  {"series", series},
                  {"all_checks_pass", all_pass}};
  std::ofstream os(fs::path(out_dir) / "summary.json");
  os << summary.dump(2) << '\n';
  return summary;
}

// ---------------------------------------------------------------- verify

struct VerifyResult {
  RunOutcome outcome;
  double residual_roundtrip = 0.0;  // max |stored - recomputed| / max stored norm
  bool roundtrip_pass = true;
  bool pass = true;
};

inline std::vector<std::vector<double>> read_csv_columns(const std::string& path, std::size_t ncols) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  std::getline(is, line);
  std::vector<std::vector<double>> cols(ncols);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (!std::getline(ss, cell, ',')) throw ConfigError(path + ": short row");
      cols[c].push_back(std::strtod(cell.c_str(), nullptr));
    }
  }
  return cols;
}

/// Rebuilds the run of a stored report on its mesh, re-samples the residuals,
/// and evaluates the offline bound against the measured errors.
inline VerifyResult verify_report(const std::string& report_path, int bound_points = 0) {
  namespace fs = std::filesystem;
  std::ifstream is(report_path);
  if (!is) throw ConfigError("cannot open report '" + report_path + "'");
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: ") + e.what());
  }
  const fs::path dir = fs::path(report_path).parent_path();
  RunSpec s;
  try {
    const json& pj = j.at("problem");
    s.id = j.at("id");
    s.series = j.at("series");
    s.source.kind = pj.at("kind");
    s.source.alpha = pj.at("alpha");
    s.source.T = pj.at("T");
    s.source.x_bar = pj.at("x_bar");
    s.source.gamma = pj.value("gamma", 0.0);
    s.source.f = pj.value("f", "");
    s.source.u0 = pj.value("u0", "");
    s.source.Lu0 = pj.value("Lu0", "");
    s.source.exact = pj.value("exact", "");
    const std::string mname = j.at("method").at("name");
    s.method = detail::to_method("method", mname, 2);
    const json& bj = j.at("barrier");
    s.barrier.kind = bj.at("kind") == "R1" ? BarrierKind::R1 : BarrierKind::R0;
    s.barrier.lambda = bj.at("lambda");
    s.barrier.omega = bj.at("omega");
    s.barrier.tau_prof = detail::null_or_num(bj.at("tau_prof"));
    s.barrier.TOL = bj.at("TOL");
    s.barrier.norm = bj.at("norm") == "L2" ? NormKind::L2 : NormKind::Linf;
    const json& aj = j.at("adapt");
    s.adapt.n_cells = aj.at("n_cells");
    s.adapt.grid_n = aj.at("grid_n");
    s.bound_points = bound_points > 0 ? bound_points : j.value("bound_points", 100);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: ") + e.what());
  }
  const std::vector<double> nodes = read_csv_columns((dir / "mesh.csv").string(), 1)[0];
  const ProblemSpec p = build_problem(s.source);

  VerifyResult v;
  FixedMeshRun run(p, s.method, s.barrier, s.adapt);
  AdaptResult r = run.run(nodes);
  r.report.status = j.at("status");
  const ResidualEngine eng(run.stepper());

  // residual round trip
  const auto stored = read_csv_columns((dir / "residuals.csv").string(), 4);
  if (stored[0].size() != r.report.residuals.size()) {
    v.roundtrip_pass = false;
    v.residual_roundtrip = std::numeric_limits<double>::infinity();
  } else {
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < stored[1].size(); ++i) {
      scale = std::max(scale, std::abs(stored[1][i]));
      diff = std::max(diff, std::abs(stored[1][i] - r.report.residuals[i].norm));
      diff = std::max(diff, std::abs(stored[0][i] - r.report.residuals[i].t) / std::max(1.0, stored[0][i]) * scale);
    }
    v.residual_roundtrip = scale > 0.0 ? diff / scale : diff;
    v.roundtrip_pass = v.residual_roundtrip <= 1e-12;
  }

  RunOutcome& o = v.outcome;
  o.spec = s;
  o.spec.check_error = !r.report.errors.empty();
  o.spec.check_bound = true;
  o.report = r.report;
  o.error_check = check_errors(o.report, o.spec.check_error);
  o.bound = bound_trace(o.report, eng, r.solution, run.space(), s.bound_points);
  o.bound_check = check_bounds(o.report, o.bound, true);
  o.dir = dir.string();
  v.pass = v.roundtrip_pass && o.checks_pass();
  return v;
}

}  // namespace fracadapt
