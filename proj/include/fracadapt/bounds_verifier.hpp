#pragma once

// Offline error bound ||e(t)|| <= c (D^alpha + lambda)^{-1} ||R_h||(t), c = 1 in L2
// and c = 1 + omega in L_inf (comparison function 1 <= g <= 1 + omega), where
//   (D^alpha + lambda)^{-1} v(t) = int_0^t (t-s)^{alpha-1} E_{alpha,alpha}(-lambda (t-s)^alpha) v(s) ds
//                                = (1/alpha) int_0^{t^alpha} E_{alpha,alpha}(-lambda w) v(t - w^{1/alpha}) dw.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include "fracadapt/errors.hpp"
#include "fracadapt/quadrature.hpp"
#include "fracadapt/spatial_fem.hpp"
#include "fracadapt/special_functions.hpp"

namespace fracadapt {

/// Piecewise Chebyshev interpolant of x -> E_{alpha,beta}(-x) on [0, x_max],
/// refined until it reproduces direct evaluations to ~1e-13 relative.
class MittagLefflerTable {
 public:
  static constexpr int kDegree = 24;

  MittagLefflerTable(double alpha, double beta, double x_max) : p_{alpha, beta} {
    if (!(x_max >= 0.0)) throw DomainError("MittagLefflerTable: x_max must be >= 0");
    double a = 0.0, b = 1.0;
    while (true) {
      build(a, b, 0);
      if (b >= x_max) break;
      a = b;
      b *= 2.0;
    }
    x_max_ = b;
  }

  double operator()(double x) const {
    if (x < 0.0 || x > x_max_) throw DomainError("MittagLefflerTable: argument outside table");
    auto it = std::upper_bound(lo_.begin(), lo_.end(), x);
    const std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - lo_.begin()) - 1));
    return clenshaw(i, x);
  }

 private:
  void build(double a, double b, int depth) {
    std::array<double, kDegree + 1> v{};
    for (int j = 0; j <= kDegree; ++j) {
      const double th = std::numbers::pi * (j + 0.5) / (kDegree + 1);
      v[static_cast<std::size_t>(j)] = mittag_leffler_neg(p_, -(0.5 * (a + b) + 0.5 * (b - a) * std::cos(th)));
    }
    std::array<double, kDegree + 1> c{};
    for (int k = 0; k <= kDegree; ++k) {
      double s = 0.0;
      for (int j = 0; j <= kDegree; ++j) {
        s += v[static_cast<std::size_t>(j)] * std::cos(std::numbers::pi * k * (j + 0.5) / (kDegree + 1));
      }
      c[static_cast<std::size_t>(k)] = 2.0 * s / (kDegree + 1);
    }
    lo_.push_back(a);
    hi_.push_back(b);
    coef_.push_back(c);
    const std::size_t idx = lo_.size() - 1;
    if (depth >= 12) return;
    double worst = 0.0;
    for (double f : {0.137, 0.5, 0.871}) {
      const double x = a + f * (b - a);
      const double ref = mittag_leffler_neg(p_, -x);
      worst = std::max(worst, std::abs(clenshaw(idx, x) - ref) / std::max(std::abs(ref), 1e-300));
    }
    if (worst > 1e-13) {
      lo_.pop_back();
      hi_.pop_back();
      coef_.pop_back();
      const double mid = 0.5 * (a + b);
      build(a, mid, depth + 1);
      build(mid, b, depth + 1);
    }
  }

  double clenshaw(std::size_t i, double x) const {
    const double a = lo_[i], b = hi_[i];
    const double y = (2.0 * x - a - b) / (b - a);
    double b1 = 0.0, b2 = 0.0;
    const auto& c = coef_[i];
    for (int k = kDegree; k >= 1; --k) {
      const double t = 2.0 * y * b1 - b2 + c[static_cast<std::size_t>(k)];
      b2 = b1;
      b1 = t;
    }
    return y * b1 - b2 + 0.5 * c[0];
  }

  MLParams p_;
  double x_max_ = 0.0;
  std::vector<double> lo_, hi_;
  std::vector<std::array<double, kDegree + 1>> coef_;
};

/// Piecewise-linear function through (t_i, v_i), t strictly increasing.
struct Envelope {
  std::vector<double> t;
  std::vector<double> v;

  double operator()(double s) const {
    if (s <= t.front()) return v.front();
    if (s >= t.back()) return v.back();
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (s - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * v[i - 1] + w * v[i];
  }
};

/// Builds an envelope from samples; unsorted input and duplicate times are
/// allowed (duplicates keep the larger value).
inline Envelope make_envelope(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  Envelope e;
  for (const auto& [t, v] : pts) {
    if (!e.t.empty() && t == e.t.back()) {
      e.v.back() = std::max(e.v.back(), v);
    } else {
      e.t.push_back(t);
      e.v.push_back(v);
    }
  }
  if (e.t.empty()) throw DomainError("envelope: no samples");
  return e;
}

class InverseOperator {
 public:
  InverseOperator(double alpha, double lambda, double t_max)
      : alpha_(alpha), lambda_(lambda),
        table_(alpha, alpha, lambda > 0.0 ? lambda * std::pow(t_max, alpha) : 0.0) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("inverse operator: alpha must be in (0,1]");
    if (!(lambda >= 0.0)) throw DomainError("inverse operator: lambda must be >= 0");
    t_max_ = t_max;
  }

  double operator()(const Envelope& v, double t, double rel_tol = 1e-10) const {
    if (!(t > 0.0) || t > t_max_ * (1.0 + 1e-12)) throw DomainError("inverse operator: t outside (0, t_max]");
    if (v.t.empty() || v.t.front() > 0.0 || v.t.back() < t * (1.0 - 1e-12)) {
      throw DomainError("inverse operator: samples do not cover (0, t]");
    }
    const double W = std::pow(t, alpha_);
    std::vector<double> way;
    for (double ti : v.t) {
      if (ti > 0.0 && ti < t) {
        const double w = std::pow(t - ti, alpha_);
        if (w > 0.0 && w < W) way.push_back(w);
      }
    }
    const double ia = 1.0 / alpha_;
    auto f = [&](double w) {
      const double s = std::max(0.0, t - std::pow(w, ia));
      return kernel(w) * v(s);
    };
    QuadratureOptions q;
    q.rel_tol = rel_tol;
    q.max_panels = std::max<std::size_t>(20000, 4 * way.size() + 100);
    return ia * integrate_scalar(f, 0.0, W, way, q);
  }

  double alpha() const noexcept { return alpha_; }
  double lambda() const noexcept { return lambda_; }

 private:
  double kernel(double w) const {
    if (lambda_ == 0.0) return 1.0 / gamma(alpha_);
    return table_(lambda_ * w);
  }

  double alpha_;
  double lambda_;
  double t_max_ = 0.0;
  MittagLefflerTable table_;
};

inline double inverse_fractional_operator(double alpha, double lambda, const Envelope& v, double t) {
  InverseOperator op(alpha, lambda, t);
  return op(v, t);
}

/// Constant in front of the inverse operator for the given norm.
inline double bound_factor(NormKind norm, double omega) { return norm == NormKind::Linf ? 1.0 + omega : 1.0; }

struct BoundTrace {
  std::vector<double> times;
  std::vector<double> bounds;
  std::vector<double> errors;  // NaN where unknown
};

inline void write_bound_csv(std::ostream& os, const BoundTrace& b) {
  os << "t,bound,error\n" << std::setprecision(17);
  for (std::size_t i = 0; i < b.times.size(); ++i) {
    os << b.times[i] << ',' << b.bounds[i] << ',' << b.errors[i] << '\n';
  }
}

}  // namespace fracadapt
