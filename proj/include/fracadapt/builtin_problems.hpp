#pragma once

#include <cmath>
#include <numbers>

#include "fracadapt/errors.hpp"
#include "fracadapt/problem.hpp"
#include "fracadapt/special_functions.hpp"

namespace fracadapt {

/// u(x,t) = (t^alpha - t^2 + 1) x (1 - x) on (0,1) x (0,1].
inline ProblemSpec builtin_example1(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("example1: alpha must be in (0,1)");
  ProblemSpec p;
  p.name = "example1";
  p.alpha = alpha;
  p.T = 1.0;
  p.x_bar = 1.0;
  const double g1a = gamma(1.0 + alpha);
  const double g3a = gamma(3.0 - alpha);
  // D_t^a t^a = Gamma(1+a), D_t^a t^2 = 2 t^(2-a) / Gamma(3-a), -d_xx x(1-x) = 2
  p.f = [alpha, g1a, g3a](double x, double t) {
    const double q = x * (1.0 - x);
    return (g1a - 2.0 * std::pow(t, 2.0 - alpha) / g3a) * q +
           2.0 * (std::pow(t, alpha) - t * t + 1.0);
  };
  p.u0 = [](double x) { return x * (1.0 - x); };
  p.Lu0 = [](double) { return 2.0; };
  p.exact = [alpha](double x, double t) {
    return (std::pow(t, alpha) - t * t + 1.0) * x * (1.0 - x);
  };
  return p;
}

/// f(x,t) = (t^gamma - t) sin((x pi)^2) + t exp(-100 (2t - 1)^2), u0 = 0.
inline ProblemSpec builtin_example2(double alpha, double gamma_exp) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("example2: alpha must be in (0,1)");
  if (!(gamma_exp >= 0.0 && gamma_exp <= alpha)) throw DomainError("example2: gamma must lie in [0, alpha]");
  ProblemSpec p;
  p.name = "example2";
  p.alpha = alpha;
  p.T = 1.0;
  p.x_bar = 1.0;
  p.f = [gamma_exp](double x, double t) {
    const double s = std::sin((x * std::numbers::pi) * (x * std::numbers::pi));
    // t^0 is 1 for every t >= 0, including the limit t -> 0+
    const double tg = gamma_exp == 0.0 ? 1.0 : std::pow(t, gamma_exp);
    return (tg - t) * s + t * std::exp(-100.0 * (2.0 * t - 1.0) * (2.0 * t - 1.0));
  };
  p.u0 = [](double) { return 0.0; };
  p.Lu0 = [](double) { return 0.0; };
  p.notes = "u0 = 0 (initial data not given for this example; homogeneous choice)";
  return p;
}

}  // namespace fracadapt
