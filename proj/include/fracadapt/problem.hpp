#pragma once

#include <functional>
#include <optional>
#include <string>

namespace fracadapt {

using SpaceFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double, double)>;

/// D_t^alpha u - u_xx = f on (0, x_bar) x (0, T], u = 0 on the boundary,
/// u(., 0) = u0.
struct ProblemSpec {
  std::string name = "custom";
  double alpha = 0.5;
  double T = 1.0;
  double x_bar = 1.0;
  SpaceTimeFn f;
  SpaceFn u0;
  /// -u0''; when absent the finite element surrogate M^{-1} A u0 is used.
  std::optional<SpaceFn> Lu0;
  std::optional<SpaceTimeFn> exact;
  /// Free-form notes carried into reports.
  std::string notes;
};

}  // namespace fracadapt
