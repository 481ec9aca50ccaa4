#pragma once

// Flat key = value experiment files. One key per line, '#' or ';' starts a
// comment line, lists are comma separated with optional brackets:
//
//   problem = example1
//   alpha   = 0.4
//   method  = l1, l12, coll2
//   TOL     = [1e-2, 1e-3, 1e-4]
//
// List-valued keys (alpha, method, barrier, lambda/omega, Q1, TOL, M) expand
// into a cartesian product; TOL (adaptive) or M (fixed meshes) vary inside a
// series, everything else spans series.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fracadapt/adaptive_driver.hpp"
#include "fracadapt/errors.hpp"
#include "fracadapt/residual.hpp"
#include "fracadapt/time_solution.hpp"

namespace fracadapt {

enum class MeshMode { Adaptive, Uniform, Graded };

inline std::string mesh_mode_name(MeshMode m) {
  return m == MeshMode::Adaptive ? "adaptive" : (m == MeshMode::Uniform ? "uniform" : "graded");
}

struct ExperimentConfig {
  std::string problem = "example1";  // example1 | example2 | custom
  std::vector<double> alpha = {0.4};
  double gamma = 0.0;  // example2 only
  double T = 1.0;
  double x_bar = 1.0;
  std::string f, u0, Lu0, exact;  // custom only
  std::vector<MethodSpec> methods = {MethodSpec::coll(2)};
  std::vector<BarrierKind> barriers = {BarrierKind::R0};
  std::vector<double> lambda = {0.0};
  std::vector<double> omega = {0.0};
  bool omega_auto = false;  // omega = lambda x_bar^2 / 8
  double tau_prof = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> tols = {1e-3};
  NormKind norm = NormKind::Linf;
  MeshMode mesh = MeshMode::Adaptive;
  std::vector<int> M;
  double grading = 1.0;
  std::vector<double> Q1 = {1.2};
  AdaptiveConfig adapt;
  std::optional<bool> check_error;  // default: on when an exact solution is known
  bool check_bound = false;
  int bound_points = 100;
  std::string out = "out";
};

namespace detail {

inline std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && ws(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && ws(static_cast<unsigned char>(s[i]))) ++i;
  s.erase(0, i);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline std::vector<std::string> split_list(const std::string& key, std::string v) {
  v = trim(v);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') throw ConfigError(key + ": unterminated list");
    v = v.substr(1, v.size() - 2);
  }
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(key + ": empty list entry");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  const char* b = v.c_str();
  char* e = nullptr;
  const double d = std::strtod(b, &e);
  if (e == b || *e != '\0' || !std::isfinite(d)) throw ConfigError(key + ": '" + v + "' is not a number");
  return d;
}

inline int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(key + ": '" + v + "' is not an integer");
  return static_cast<int>(d);
}

inline bool to_bool(const std::string& key, const std::string& v) {
  const std::string l = lower(v);
  if (l == "true" || l == "yes" || l == "on" || l == "1") return true;
  if (l == "false" || l == "no" || l == "off" || l == "0") return false;
  throw ConfigError(key + ": '" + v + "' is not a boolean");
}

inline MethodSpec to_method(const std::string& key, const std::string& v, int m) {
  const std::string l = lower(v);
  try {
    if (l == "l1") return MethodSpec::l1();
    if (l == "l12" || l == "l1-2") return MethodSpec::l12();
    if (l == "coll") return MethodSpec::coll(m);
    if (l.rfind("coll", 0) == 0) {
      std::string n = l.substr(4);
      if (!n.empty() && (n.front() == '(' || n.front() == '_')) n = n.substr(1);
      if (!n.empty() && n.back() == ')') n.pop_back();
      return MethodSpec::coll(to_int(key, n));
    }
  } catch (const DomainError& e) {
    throw ConfigError(key + ": " + e.what());
  }
  throw ConfigError(key + ": unknown method '" + v + "' (l1, l12, coll<m>)");
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& is) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::map<std::string, std::string> kv;
  for (const auto& [k, v] : tree) {
    if (!v.empty()) throw ConfigError("config: sections are not supported ([" + k + "])");
    kv[k] = detail::trim(v.data());
  }
  using namespace detail;
  ExperimentConfig c;
  std::set<std::string> used;
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    used.insert(k);
    if (it->second.empty()) throw ConfigError(k + ": empty value");
    return it->second;
  };
  auto num = [&](const std::string& k, double& dst) {
    if (auto v = get(k)) dst = to_double(k, *v);
  };
  auto num_list = [&](const std::string& k, std::vector<double>& dst) {
    if (auto v = get(k)) {
      dst.clear();
      for (const auto& s : split_list(k, *v)) dst.push_back(to_double(k, s));
    }
  };
  auto integer = [&](const std::string& k, auto& dst) {
    if (auto v = get(k)) {
      const int i = to_int(k, *v);
      if (i < 0) throw ConfigError(k + ": must be >= 0");
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(i);
    }
  };

  if (auto v = get("problem")) c.problem = lower(*v);
  if (c.problem != "example1" && c.problem != "example2" && c.problem != "custom") {
    throw ConfigError("problem: expected example1, example2 or custom");
  }
  num_list("alpha", c.alpha);
  num("gamma", c.gamma);
  num("T", c.T);
  num("x_bar", c.x_bar);
  for (auto [k, dst] : {std::pair{"f", &c.f}, {"u0", &c.u0}, {"Lu0", &c.Lu0}, {"exact", &c.exact}}) {
    if (auto v = get(k)) *dst = *v;
  }
  int m = 2;
  if (auto v = get("m")) m = to_int("m", *v);
  if (auto v = get("method")) {
    c.methods.clear();
    for (const auto& s : split_list("method", *v)) c.methods.push_back(to_method("method", s, m));
  }
  if (auto v = get("barrier")) {
    c.barriers.clear();
    for (const auto& s : split_list("barrier", *v)) {
      const std::string l = lower(s);
      if (l == "r0") c.barriers.push_back(BarrierKind::R0);
      else if (l == "r1") c.barriers.push_back(BarrierKind::R1);
      else throw ConfigError("barrier: expected R0 or R1");
    }
  }
  num_list("lambda", c.lambda);
  if (auto v = get("omega")) {
    if (lower(*v) == "auto") {
      c.omega_auto = true;
    } else {
      c.omega.clear();
      for (const auto& s : split_list("omega", *v)) c.omega.push_back(to_double("omega", s));
    }
  }
  num("tau_prof", c.tau_prof);
  num_list("TOL", c.tols);
  if (auto v = get("norm")) {
    const std::string l = lower(*v);
    if (l == "linf") c.norm = NormKind::Linf;
    else if (l == "l2") c.norm = NormKind::L2;
    else throw ConfigError("norm: expected Linf or L2");
  }
  if (auto v = get("mesh")) {
    const std::string l = lower(*v);
    if (l == "adaptive") c.mesh = MeshMode::Adaptive;
    else if (l == "uniform") c.mesh = MeshMode::Uniform;
    else if (l == "graded") c.mesh = MeshMode::Graded;
    else throw ConfigError("mesh: expected adaptive, uniform or graded");
  }
  if (auto v = get("M")) {
    for (const auto& s : split_list("M", *v)) {
      const int M = to_int("M", s);
      if (M < 1) throw ConfigError("M: entries must be >= 1");
      c.M.push_back(M);
    }
  }
  num("grading", c.grading);
  num_list("Q1", c.Q1);
  num("tau_init", c.adapt.tau_init);
  num("tau_min", c.adapt.tau_min);
  num("Q0", c.adapt.Q0);
  integer("q0_iteration_cap", c.adapt.q0_iteration_cap);
  integer("inner_iteration_cap", c.adapt.inner_iteration_cap);
  integer("grid_n", c.adapt.grid_n);
  integer("n_cells", c.adapt.n_cells);
  integer("max_intervals", c.adapt.max_intervals);
  num("wall_budget", c.adapt.wall_budget);
  if (auto v = get("check_error")) c.check_error = to_bool("check_error", *v);
  if (auto v = get("check_bound")) c.check_bound = to_bool("check_bound", *v);
  integer("bound_points", c.bound_points);
  if (auto v = get("out")) c.out = *v;

  for (const auto& [k, v] : kv) {
    if (!used.count(k)) throw ConfigError("config: unknown key '" + k + "'");
  }

  // consistency
  if (c.alpha.empty()) throw ConfigError("alpha: empty list");
  for (double a : c.alpha) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha: entries must lie in (0,1)");
  }
  if (c.problem == "example2") {
    for (double a : c.alpha) {
      if (!(c.gamma >= 0.0 && c.gamma <= a)) throw ConfigError("gamma: example2 requires 0 <= gamma <= alpha");
    }
  }
  if (c.problem == "custom") {
    if (c.f.empty() || c.u0.empty()) throw ConfigError("custom problem: f and u0 are required");
  } else if (!(c.f.empty() && c.u0.empty() && c.Lu0.empty() && c.exact.empty())) {
    throw ConfigError("f, u0, Lu0 and exact apply to custom problems only");
  } else if (kv.count("T") || kv.count("x_bar")) {
    throw ConfigError("T and x_bar are fixed for the built-in examples");
  }
  if (!(c.T > 0.0) || !(c.x_bar > 0.0)) throw ConfigError("T and x_bar must be positive");
  if (!c.omega_auto && c.omega.size() != c.lambda.size()) {
    if (c.omega.size() == 1) c.omega.assign(c.lambda.size(), c.omega.front());
    else throw ConfigError("omega: give one value, 'auto', or one value per lambda");
  }
  for (double l : c.lambda) {
    if (!(l >= 0.0)) throw ConfigError("lambda: must be >= 0");
  }
  for (double w : c.omega) {
    if (!(w >= 0.0)) throw ConfigError("omega: must be >= 0");
  }
  if (c.norm == NormKind::L2 && (c.omega_auto || std::any_of(c.omega.begin(), c.omega.end(), [](double w) { return w > 0; }))) {
    throw ConfigError("omega > 0 requires norm = Linf");
  }
  if (c.mesh == MeshMode::Adaptive) {
    if (c.tols.empty()) throw ConfigError("TOL: empty list");
    for (double t : c.tols) {
      if (!(t > 0.0)) throw ConfigError("TOL: entries must be positive");
    }
    if (!c.M.empty()) throw ConfigError("M applies to uniform or graded meshes only");
  } else {
    if (c.M.empty()) throw ConfigError("M: required for uniform and graded meshes");
    if (kv.count("TOL") && c.tols.size() != 1) throw ConfigError("TOL: fixed meshes take a single TOL");
    if (c.mesh == MeshMode::Graded && !(c.grading >= 1.0)) throw ConfigError("grading: must be >= 1");
  }
  for (double q : c.Q1) {
    if (!(q > 1.0 && q < c.adapt.Q0)) throw ConfigError("Q1: need 1 < Q1 < Q0");
  }
  if (c.adapt.grid_n < 2) throw ConfigError("grid_n: must be >= 2");
  if (c.adapt.n_cells < 2) throw ConfigError("n_cells: must be >= 2");
  if (c.bound_points < 2) throw ConfigError("bound_points: must be >= 2");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(is);
}

}  // namespace fracadapt
