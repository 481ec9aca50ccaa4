#pragma once

// Caputo derivative of a continuous piecewise-polynomial u_h.
//
// For t in interval k (t = t_{k-1} + tau_k s) the integral splits into
//   history  sum_{j<k} [ p_j'(1) S_j(t) + d^{-alpha} sum_l U_j^l W_l(r) ]
//   current  tau_k^{-alpha} sum_l U_k^l Ihat^l(s)
// with d = t - t_{j-1}, r = tau_j / d, kappa = log1p(-r),
//   S_j = -d^{1-alpha} expm1((1-alpha) kappa) / ((1-alpha) tau_j),
//   W_l(r) = int_0^1 (psi^l'(x) + 1) exp(-alpha log1p(-r x)) dx.
// Everything is finally divided by Gamma(1-alpha).

#include <Eigen/Dense>

#include <array>
#include <atomic>
#include <memory>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fracadapt/errors.hpp"
#include "fracadapt/quadrature.hpp"
#include "fracadapt/special_functions.hpp"
#include "fracadapt/time_solution.hpp"

namespace fracadapt {

/// int_0^s dpsi^l(x) (s - x)^{-alpha} dx for the hierarchical basis of degree m.
inline double i_sing(int l, int m, double alpha, double s) {
  if (m < 1 || l < 0 || l > m) throw DomainError("i_sing: need 0 <= l <= m, m >= 1");
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("i_sing: t_loc must lie in [0,1]");
  const double g = 1.0 - alpha;
  if (l == 0) return -std::pow(s, g) / g;
  if (l == m) return std::pow(s, g) / g;
  // b_j = B(j+1, 1-alpha) = int_0^1 x^j (1-x)^{-alpha} dx
  double b_prev = 1.0 / g;
  for (int j = 1; j < l; ++j) b_prev *= j / (j + g);
  const double b_l = b_prev * l / (l + g);
  return std::pow(s, l - alpha) * (l * b_prev - (l + 1) * b_l * s);
}

/// Ihat^l at a fixed set of local points, rows l = 0..m.
struct SingularTable {
  int m = 1;
  double alpha = 0.5;
  std::vector<double> points;
  Eigen::MatrixXd values;

  SingularTable() = default;
  SingularTable(int m_, double alpha_, std::vector<double> pts)
      : m(m_), alpha(alpha_), points(std::move(pts)) {
    values.resize(m + 1, static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (int l = 0; l <= m; ++l) values(l, static_cast<Eigen::Index>(i)) = i_sing(l, m, alpha, points[i]);
    }
  }
};

struct CaputoOptions {
  double remainder_rel_tol = 1e-12;
  /// Below this ratio tau_j/d the history weights are summed as power series.
  double series_radius = 0.125;
};

struct CaputoCounters {
  std::size_t evaluations = 0;       // time points at which D^alpha u_h was formed
  std::size_t quadrature_calls = 0;  // adaptive remainder integrals
};

namespace detail {
struct AtomicCounters {
  std::atomic<std::size_t> evaluations{0};
  std::atomic<std::size_t> quadrature_calls{0};
};
}  // namespace detail

class CaputoEvaluator {
 public:
  static constexpr int kSeriesTerms = 20;

  explicit CaputoEvaluator(double alpha, CaputoOptions opts = {}) : alpha_(alpha), opts_(opts) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("CaputoEvaluator: alpha must be in (0,1)");
    inv_gamma_ = 1.0 / gamma(1.0 - alpha);
    // (1 - (1-r)^g)/(g r) = sum_n (alpha)_n/(n+1)! r^n ; (1-r x)^{-alpha} = sum_n (alpha)_n/n! (r x)^n
    double a = 1.0;  // (alpha)_n / n!
    for (int n = 0; n < kSeriesTerms; ++n) {
      kernel_coef_[n] = a;
      s_coef_[n] = a / (n + 1);
      a *= (alpha + n) / (n + 1);
    }
    w_coef_.resize(13);
    for (int l = 1; l < 13; ++l) {
      for (int n = 0; n < kSeriesTerms; ++n) {
        const double mom = static_cast<double>(l) / (n + l) - (l + 1.0) / (n + l + 1.0) + 1.0 / (n + 1.0);
        w_coef_[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)] = kernel_coef_[static_cast<std::size_t>(n)] * mom;
      }
    }
  }

  double alpha() const noexcept { return alpha_; }
  double inv_gamma() const noexcept { return inv_gamma_; }
  CaputoCounters counters() const noexcept {
    return {counters_->evaluations.load(), counters_->quadrature_calls.load()};
  }

  /// Series coefficients of W_l for interior index l (1 <= l < m); m-independent.
  const std::array<double, kSeriesTerms>& remainder_series(int l) const {
    return w_coef_.at(static_cast<std::size_t>(l));
  }

  /// W_l(r), l = 1..dim, by adaptive quadrature of the printed integrand.
  void remainder_quadrature(double r, int dim, double* out) const {
    static constexpr std::array<double, 3> way = {0.5, 0.9, 0.99};
    const double a = alpha_;
    auto f = [a, r, dim](double x, std::span<double> v) {
      const double k = std::exp(-a * std::log1p(-r * x));
      double p = 1.0;  // x^(l-1)
      for (int l = 1; l <= dim; ++l) {
        const double dpsi = l * p * (1.0 - x) - p * x;
        v[static_cast<std::size_t>(l - 1)] = (dpsi + 1.0) * k;
        p *= x;
      }
    };
    QuadratureOptions q;
    q.rel_tol = opts_.remainder_rel_tol;
    const QuadratureResult res = integrate_adaptive(f, static_cast<std::size_t>(dim), 0.0, 1.0, way, q);
    ++counters_->quadrature_calls;
    for (int l = 0; l < dim; ++l) out[l] = res.value[static_cast<std::size_t>(l)];
  }

  /// History part (intervals 1..k-1) at t = t_{k-1} + tau_k s for each s,
  /// unscaled by 1/Gamma(1-alpha). Returns an n x |s| matrix.
  Eigen::MatrixXd history(const TimeSolution& sol, std::size_t k, double tau_k,
                          std::span<const double> s) const {
    const std::size_t K = k - 1;
    const Eigen::Index n = static_cast<Eigen::Index>(sol.dofs());
    const Eigen::Index S = static_cast<Eigen::Index>(s.size());
    if (sol.intervals() < K) throw PreconditionError("history: solution not defined through interval k-1");
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, S);
    if (K == 0 || S == 0) return H;

    const Eigen::Index Ki = static_cast<Eigen::Index>(K);
    const double tk1 = sol.node(K);
    Eigen::ArrayXd base(Ki), tau(Ki);
    for (std::size_t j = 1; j <= K; ++j) {
      base[static_cast<Eigen::Index>(j - 1)] = tk1 - sol.node(j - 1);
      tau[static_cast<Eigen::Index>(j - 1)] = sol.step(j);
    }
    const int stride = sol.interior_stride();
    const bool interior = stride > 0;

    Eigen::MatrixXd Sw(Ki, S);
    Eigen::MatrixXd Iw;
    if (interior) Iw.resize(Ki * stride, S);

    const double g = 1.0 - alpha_;
    Eigen::ArrayXd D(Ki), r(Ki), dna(Ki), poly(Ki);
    std::vector<double> wq(static_cast<std::size_t>(std::max(stride, 1)));
    for (Eigen::Index c = 0; c < S; ++c) {
      D = base + tau_k * s[static_cast<std::size_t>(c)];
      r = tau / D;
      dna = (-alpha_ * D.log()).exp();
      poly.setConstant(s_coef_[kSeriesTerms - 1]);
      for (int i = kSeriesTerms - 2; i >= 0; --i) poly = poly * r + s_coef_[i];
      Sw.col(c) = (dna * poly).matrix();
      for (Eigen::Index j = 0; j < Ki; ++j) {
        if (r[j] > opts_.series_radius) {
          const double kappa = std::log1p(-r[j]);
          Sw(j, c) = -std::pow(D[j], g) * std::expm1(g * kappa) / (g * tau[j]);
        }
      }
      if (interior) {
        for (int l = 1; l <= stride; ++l) {
          const auto& wc = remainder_series(l);
          poly.setConstant(wc[kSeriesTerms - 1]);
          for (int i = kSeriesTerms - 2; i >= 0; --i) poly = poly * r + wc[i];
          poly *= dna;
          for (Eigen::Index j = 0; j < Ki; ++j) Iw(j * stride + (l - 1), c) = poly[j];
        }
        for (Eigen::Index j = 0; j < Ki; ++j) {
          if (r[j] > opts_.series_radius) {
            remainder_quadrature(r[j], stride, wq.data());
            for (int l = 1; l <= stride; ++l) Iw(j * stride + (l - 1), c) = dna[j] * wq[static_cast<std::size_t>(l - 1)];
          }
        }
      }
    }
    Eigen::Map<const Eigen::MatrixXd> dmat(sol.endpoint_derivatives().data(), n, Ki);
    H.noalias() = dmat * Sw;
    if (interior) {
      Eigen::Map<const Eigen::MatrixXd> imat(sol.interior_coefficients().data(), n, Ki * stride);
      H.noalias() += imat * Iw;
    }
    return H;
  }

  /// D^alpha u_h at local points s of interval k (block k must exist).
  Eigen::MatrixXd at_local(const TimeSolution& sol, std::size_t k, std::span<const double> s,
                           const SingularTable* table = nullptr) const {
    if (k < 1 || k > sol.intervals()) throw PreconditionError("at_local: interval not solved");
    const double tau_k = sol.step(k);
    Eigen::MatrixXd out = history(sol, k, tau_k, s);
    const IntervalBlock& b = sol.block(k);
    const int d = b.degree();
    const double scale = std::pow(tau_k, -alpha_);
    if (table && (table->m != d || table->points.size() != s.size())) table = nullptr;
    for (std::size_t c = 0; c < s.size(); ++c) {
      for (int l = 0; l <= d; ++l) {
        const double w = table ? table->values(l, static_cast<Eigen::Index>(c)) : i_sing(l, d, alpha_, s[c]);
        out.col(static_cast<Eigen::Index>(c)) += (scale * w) * b.coeffs[static_cast<std::size_t>(l)];
      }
    }
    counters_->evaluations += s.size();
    return out * inv_gamma_;
  }

  SpatialVector eval(const TimeSolution& sol, double t) const {
    if (!(t > 0.0) || t > sol.mesh().final_time()) throw DomainError("eval_caputo: t outside (0, T]");
    const std::size_t k = sol.mesh().locate(t);
    const double s = std::min(1.0, (t - sol.node(k - 1)) / sol.step(k));
    const std::array<double, 1> pts = {s};
    return at_local(sol, k, pts).col(0);
  }

  /// Values at the local interpolation points of interval k: the collocation
  /// fractions for Coll(m), the two endpoints otherwise. The left endpoint is
  /// the limit from the left (history only).
  std::vector<SpatialVector> at_nodes(const TimeSolution& sol, std::size_t k) const {
    const MethodSpec& ms = sol.method();
    std::vector<double> pts = ms.kind == MethodKind::Coll ? ms.collocation_points() : std::vector<double>{0.0, 1.0};
    const Eigen::MatrixXd v = at_local(sol, k, pts);
    std::vector<SpatialVector> out;
    for (Eigen::Index c = 0; c < v.cols(); ++c) out.emplace_back(v.col(c));
    return out;
  }

 private:
  double alpha_;
  CaputoOptions opts_;
  double inv_gamma_;
  std::array<double, kSeriesTerms> kernel_coef_{};
  std::array<double, kSeriesTerms> s_coef_{};
  std::vector<std::array<double, kSeriesTerms>> w_coef_;
  std::shared_ptr<detail::AtomicCounters> counters_ = std::make_shared<detail::AtomicCounters>();
};

}  // namespace fracadapt
