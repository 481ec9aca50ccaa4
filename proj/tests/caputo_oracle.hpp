#pragma once

// Brute-force Caputo derivative of a stored solution, independent of the
// evaluator's history/series machinery, plus random solutions to feed it.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fracadapt/time_solution.hpp"

namespace fracadapt::testing {

// Gauss-Legendre rule on [0,1], long double
struct Gauss {
  std::vector<long double> x, w;
  explicit Gauss(int n) {
    for (int i = 1; i <= n; ++i) {
      long double z = std::cos(3.14159265358979323846L * (i - 0.25L) / (n + 0.5L));
      long double dp = 0;
      for (int it = 0; it < 100; ++it) {
        long double p0 = 1, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1);
        const long double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-19L) break;
      }
      x.push_back((1 - z) / 2);
      w.push_back(1 / ((1 - z * z) * dp * dp));
    }
  }
};

// 1/Gamma(1-a) int_0^t (t-s)^{-a} u'(s) ds, interval by interval, in the
// distance r = t - s. Panels are graded geometrically towards the near end so
// the kernel r^{-a} is analytic on each panel; the leftover sliver uses
// w = r^{1-a}, on which u' is practically constant.
inline SpatialVector brute_caputo(const TimeSolution& sol, double t, double alpha) {
  static const Gauss g(20);
  const long double ga = 1.0L - alpha;
  const Eigen::Index n = static_cast<Eigen::Index>(sol.dofs());
  Eigen::Matrix<long double, Eigen::Dynamic, 1> acc = Eigen::Matrix<long double, Eigen::Dynamic, 1>::Zero(n);
  for (std::size_t j = 1; j <= sol.intervals(); ++j) {
    const long double a = sol.node(j - 1), tau = sol.step(j);
    if (a >= t) break;
    const long double b = std::min<long double>(sol.node(j), t);
    const IntervalBlock& blk = sol.block(j);
    const int d = blk.degree();
    auto add = [&](long double r, long double weight) {
      const double sig = static_cast<double>((t - r - a) / tau);
      for (int l = 0; l <= d; ++l) {
        const long double c = weight * basis::dpsi(l, d, std::clamp(sig, 0.0, 1.0)) / tau;
        for (Eigen::Index i = 0; i < n; ++i) acc[i] += c * blk.coeffs[static_cast<std::size_t>(l)][i];
      }
    };
    const long double r0 = t - b, width = b - a;
    std::vector<long double> cuts;
    for (int i = 0; i <= 40; ++i) cuts.push_back(r0 + width * std::ldexp(1.0L, -i));
    for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
      const long double hi = cuts[p], lo = cuts[p + 1];
      for (std::size_t q = 0; q < g.x.size(); ++q) {
        const long double r = lo + (hi - lo) * g.x[q];
        add(r, (hi - lo) * g.w[q] * std::pow(r, -static_cast<long double>(alpha)));
      }
    }
    const long double w0 = std::pow(r0, ga), w1 = std::pow(cuts.back(), ga);
    for (std::size_t q = 0; q < g.x.size(); ++q) {
      const long double w = w0 + (w1 - w0) * g.x[q];
      add(std::pow(w, 1 / ga), (w1 - w0) * g.w[q] / ga);
    }
  }
  return (acc / std::tgamma(1.0L - alpha)).cast<double>();
}

inline SpatialVector random_vec(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpatialVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline TimeSolution random_solution(std::mt19937_64& rng, MethodSpec ms, double* t_end) {
  std::uniform_int_distribution<int> nint(1, 12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::Index n = 3;
  TimeSolution sol(ms, random_vec(rng, n));
  const int K = nint(rng);
  // steps range over several decades so both history branches are exercised
  double t = 0.0;
  for (int k = 1; k <= K; ++k) {
    t += std::pow(10.0, -4.0 * u(rng));
    IntervalBlock b;
    const int d = ms.degree(static_cast<std::size_t>(k));
    b.coeffs.push_back(sol.node_value(static_cast<std::size_t>(k - 1)));
    for (int l = 1; l <= d; ++l) b.coeffs.push_back(random_vec(rng, n));
    sol.append(t, std::move(b));
  }
  *t_end = t;
  return sol;
}

}  // namespace fracadapt::testing
