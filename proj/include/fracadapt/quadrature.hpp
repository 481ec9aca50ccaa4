#pragma once

// Adaptive Gauss-Kronrod (7,15) quadrature for vector-valued integrands.
//
// All components share one refinement tree. The panel with the largest
// scaled error estimate is bisected until every component satisfies
//   err_c <= max(rel_tol * |value_c|, abs_floor).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fracadapt/errors.hpp"

namespace fracadapt {

namespace gk15 {

// Kronrod abscissae on [-1,1] (non-negative half); odd indices are the
// embedded 7-point Gauss nodes.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace gk15

struct QuadratureOptions {
  double rel_tol = 1e-14;
  double abs_floor = 1e-300;
  std::size_t max_panels = 2000;
};

struct QuadratureResult {
  std::vector<double> value;
  std::vector<double> error;
  std::size_t panels = 0;
  std::size_t evaluations = 0;
  /// True when some panels stopped refining because their error estimate
  /// reached the floating-point noise floor.
  bool roundoff_limited = false;
};

namespace detail {

// One GK15 panel: writes the Kronrod value and |K - G| per component.
template <class F>
void gk15_panel(F& f, std::size_t dim, double a, double b,
                std::span<double> kron, std::span<double> err,
                std::span<double> abs_kron, std::vector<double>& scratch) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  scratch.assign(2 * dim, 0.0);
  double* gauss = scratch.data() + dim;
  std::fill(kron.begin(), kron.end(), 0.0);
  std::fill(abs_kron.begin(), abs_kron.end(), 0.0);

  auto accumulate = [&](double x, double wk, double wgauss, bool in_gauss) {
    std::span<double> out(scratch.data(), dim);
    f(x, out);
    for (std::size_t c = 0; c < dim; ++c) {
      const double v = scratch[c];
      if (!std::isfinite(v)) {
        throw EvaluationError("non-finite integrand value", x);
      }
      kron[c] += wk * v;
      abs_kron[c] += wk * std::abs(v);
      if (in_gauss) gauss[c] += wgauss * v;
    }
  };

  // centre node (belongs to the Gauss rule as well)
  accumulate(center, gk15::wgk[7], gk15::wg[3], true);
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = half * gk15::xgk[i];
    const bool in_gauss = (i % 2 == 1);
    const double wgauss = in_gauss ? gk15::wg[i / 2] : 0.0;
    accumulate(center - dx, gk15::wgk[i], wgauss, in_gauss);
    accumulate(center + dx, gk15::wgk[i], wgauss, in_gauss);
  }
  for (std::size_t c = 0; c < dim; ++c) {
    kron[c] *= half;
    abs_kron[c] *= std::abs(half);
    err[c] = std::abs(kron[c] - half * gauss[c]);
  }
}

}  // namespace detail

/// Integrates f over [a,b]. f is called as f(x, std::span<double> out) and
/// must fill all `dim` components. Waypoints must lie strictly inside (a,b);
/// they are sorted and deduplicated here.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::size_t dim, double a, double b,
                                    std::span<const double> waypoints = {},
                                    const QuadratureOptions& opts = {}) {
  if (!(a < b)) throw DomainError("integrate_adaptive: require a < b");
  if (dim == 0) throw PreconditionError("integrate_adaptive: dim must be > 0");
  if (!(opts.rel_tol > 0.0)) throw DomainError("integrate_adaptive: rel_tol must be > 0");

  std::vector<double> cuts;
  cuts.reserve(waypoints.size() + 2);
  cuts.push_back(a);
  {
    std::vector<double> w(waypoints.begin(), waypoints.end());
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    for (double p : w) {
      if (!(p > a && p < b)) throw DomainError("integrate_adaptive: waypoint outside (a,b)");
      cuts.push_back(p);
    }
  }
  cuts.push_back(b);

  struct Panel {
    double a, b;
    bool settled;
  };
  std::vector<Panel> panels;
  std::vector<double> kron, err, absk;  // flat, dim per panel
  std::vector<double> scratch;
  QuadratureResult res;
  res.value.assign(dim, 0.0);
  res.error.assign(dim, 0.0);

  constexpr double eps = std::numeric_limits<double>::epsilon();

  auto evaluate = [&](double pa, double pb) {
    const std::size_t idx = panels.size();
    panels.push_back({pa, pb, false});
    kron.resize(kron.size() + dim);
    err.resize(err.size() + dim);
    absk.resize(absk.size() + dim);
    std::span<double> k(kron.data() + idx * dim, dim);
    std::span<double> e(err.data() + idx * dim, dim);
    std::span<double> ak(absk.data() + idx * dim, dim);
    detail::gk15_panel(f, dim, pa, pb, k, e, ak, scratch);
    res.evaluations += 15;
    // Error estimates below the rounding level of the panel carry no
    // information; such panels are not refined further.
    bool noise = true;
    for (std::size_t c = 0; c < dim; ++c) {
      const double floor_c = 50.0 * eps * ak[c];
      if (e[c] > floor_c) noise = false;
      e[c] = std::max(e[c], floor_c);
    }
    const double width_floor = 100.0 * eps * std::max(std::abs(pa), std::abs(pb));
    if (noise || (pb - pa) <= width_floor) panels[idx].settled = true;
    return idx;
  };

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) evaluate(cuts[i], cuts[i + 1]);

  auto totals = [&]() {
    std::fill(res.value.begin(), res.value.end(), 0.0);
    std::fill(res.error.begin(), res.error.end(), 0.0);
    for (std::size_t p = 0; p < panels.size(); ++p) {
      if (panels[p].a > panels[p].b) continue;  // retired
      for (std::size_t c = 0; c < dim; ++c) {
        res.value[c] += kron[p * dim + c];
        res.error[c] += err[p * dim + c];
      }
    }
  };

  // Scale used to compare components of different magnitude when choosing
  // which panel to bisect.
  totals();
  std::vector<double> scale(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    scale[c] = std::max(std::abs(res.value[c]), opts.abs_floor);
  }
  auto key = [&](std::size_t p) {
    double k = 0.0;
    for (std::size_t c = 0; c < dim; ++c) k = std::max(k, err[p * dim + c] / scale[c]);
    return k;
  };

  std::priority_queue<std::pair<double, std::size_t>> heap;
  for (std::size_t p = 0; p < panels.size(); ++p) {
    if (!panels[p].settled) heap.emplace(key(p), p);
  }

  std::size_t live = panels.size();
  auto converged = [&]() {
    for (std::size_t c = 0; c < dim; ++c) {
      if (res.error[c] > std::max(opts.rel_tol * std::abs(res.value[c]), opts.abs_floor)) {
        return false;
      }
    }
    return true;
  };

  while (!converged()) {
    if (heap.empty()) {
      res.roundoff_limited = true;
      break;
    }
    if (live >= opts.max_panels) {
      throw ConvergenceError("integrate_adaptive: panel limit reached", res.value, res.error);
    }
    const std::size_t p = heap.top().second;
    heap.pop();
    const double pa = panels[p].a;
    const double pb = panels[p].b;
    const double mid = 0.5 * (pa + pb);
    for (std::size_t c = 0; c < dim; ++c) {
      res.value[c] -= kron[p * dim + c];
      res.error[c] -= err[p * dim + c];
    }
    panels[p].a = 1.0;  // retire
    panels[p].b = 0.0;
    const std::size_t l = evaluate(pa, mid);
    const std::size_t r = evaluate(mid, pb);
    for (std::size_t q : {l, r}) {
      for (std::size_t c = 0; c < dim; ++c) {
        res.value[c] += kron[q * dim + c];
        res.error[c] += err[q * dim + c];
      }
      if (!panels[q].settled) heap.emplace(key(q), q);
    }
    ++live;
    // incremental updates drift; resync occasionally
    if (live % 64 == 0) totals();
  }
  totals();
  res.panels = live;
  return res;
}

/// Scalar convenience wrapper.
template <class F>
double integrate_scalar(F&& f, double a, double b, std::span<const double> waypoints = {},
                        const QuadratureOptions& opts = {}, double* error = nullptr) {
  auto wrapped = [&](double x, std::span<double> out) { out[0] = f(x); };
  const QuadratureResult r = integrate_adaptive(wrapped, 1, a, b, waypoints, opts);
  if (error) *error = r.error[0];
  return r.value[0];
}

}  // namespace fracadapt
