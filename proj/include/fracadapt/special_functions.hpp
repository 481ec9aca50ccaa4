#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracadapt/errors.hpp"
#include "fracadapt/quadrature.hpp"

namespace fracadapt {

/// Gamma function for x > 0 (Lanczos, g = 7, reflection below 1/2).
inline double gamma(double x) {
  if (!(x > 0.0)) throw DomainError("gamma: argument must be positive");
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma(1.0 - x));
  }
  const double z = x - 1.0;
  double a = c[0];
  const double t = z + 7.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

struct MLParams {
  double alpha;
  double beta;
};

namespace detail {

inline double ml_series(MLParams p, double x) {
  // sum_k x^k / Gamma(alpha k + beta); used only for |x| <= 1
  double sum = 0.0, comp = 0.0, xk = 1.0;
  for (int k = 0; k < 2000; ++k) {
    const double arg = p.alpha * k + p.beta;
    const double term = xk / gamma(arg);
    // Kahan summation
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (k > 3 && std::abs(term) < 1e-18 * std::abs(sum)) break;
    xk *= x;
    if (xk == 0.0) break;
  }
  return sum;
}

// Real-line integral representation valid for 0 < alpha < 1, beta < 1 + alpha
// and z = -x < 0:
//   E(-x) = 1/pi int_0^inf v^(alpha-beta) e^-v
//           [v^alpha sin(pi(1-beta)) + x sin(pi(1-beta+alpha))]
//           / (v^(2 alpha) + 2 x v^alpha cos(pi alpha) + x^2) dv
inline double ml_integral(MLParams p, double x) {
  const double a = p.alpha, b = p.beta;
  const double s1 = std::sin(std::numbers::pi * (1.0 - b));
  const double s2 = std::sin(std::numbers::pi * (1.0 - b + a));
  const double ca = std::cos(std::numbers::pi * a);
  auto integrand = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double va = std::pow(v, a);
    const double den = va * va + 2.0 * x * va * ca + x * x;
    return std::pow(v, a - b) * std::exp(-v) * (va * s1 + x * s2) / den;
  };
  QuadratureOptions opts;
  opts.rel_tol = 1e-13;
  opts.max_panels = 4000;
  // The denominator is smallest near v = x^(1/alpha) (sharp when alpha -> 1).
  const double peak = std::pow(x, 1.0 / a);
  double total = 0.0;
  const std::array<double, 6> cuts = {0.0, 1.0, 8.0, 40.0, 200.0, 750.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    std::array<double, 3> wp{};
    std::size_t nwp = 0;
    for (double w : {0.5 * peak, peak, 1.5 * peak}) {
      if (w > lo && w < hi) wp[nwp++] = w;
    }
    total += integrate_scalar(integrand, lo, hi, std::span<const double>(wp.data(), nwp), opts);
  }
  return total / std::numbers::pi;
}

}  // namespace detail

/// Generalized Mittag-Leffler function E_{alpha,beta}(x) for x <= 0.
/// Supported parameters: alpha in (0,1], beta > 0, beta < 1 + alpha.
inline double mittag_leffler_neg(MLParams p, double x) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw DomainError("mittag_leffler_neg: alpha must be in (0,1]");
  if (!(p.beta > 0.0)) throw DomainError("mittag_leffler_neg: beta must be positive");
  if (x > 0.0) throw DomainError("mittag_leffler_neg: x must be <= 0");
  if (x == 0.0) return 1.0 / gamma(p.beta);
  if (p.alpha == 1.0) {
    if (p.beta == 1.0) return std::exp(x);
    if (std::abs(x) <= 1.0) return detail::ml_series(p, x);
    throw DomainError("mittag_leffler_neg: alpha = 1 supports beta = 1 only for |x| > 1");
  }
  if (p.beta >= 1.0 + p.alpha) throw DomainError("mittag_leffler_neg: beta must be below 1 + alpha");
  if (std::abs(x) <= 1.0) return detail::ml_series(p, x);
  return detail::ml_integral(p, -x);
}

/// b^g - a^g for 0 <= b < a, evaluated as a^g * expm1(g * log1p((b - a) / a))
/// so that the difference keeps full relative accuracy when a - b << a.
inline double stable_power_diff(double a, double b, double g) {
  if (!(a > 0.0)) throw DomainError("stable_power_diff: a must be positive");
  if (!(b >= 0.0 && b < a)) throw DomainError("stable_power_diff: require 0 <= b < a");
  return std::pow(a, g) * std::expm1(g * std::log1p((b - a) / a));
}

}  // namespace fracadapt
