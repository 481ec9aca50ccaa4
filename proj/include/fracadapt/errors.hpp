#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracadapt {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Caller violated a structural precondition (sizes, ordering, missing data).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Integrand produced a NaN or infinity.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, double abscissa)
      : std::runtime_error(what), abscissa_(abscissa) {}
  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

/// Adaptive quadrature ran out of panels before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best_estimate,
                   std::vector<double> error_estimate)
      : std::runtime_error(what),
        best_(std::move(best_estimate)),
        error_(std::move(error_estimate)) {}
  const std::vector<double>& best_estimate() const noexcept { return best_; }
  const std::vector<double>& error_estimate() const noexcept { return error_; }

 private:
  std::vector<double> best_;
  std::vector<double> error_;
};

/// Linear solve failed (singular or non-finite system).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The adaptive loop could not settle an interval within its iteration cap.
class AdaptationError : public std::runtime_error {
 public:
  AdaptationError(const std::string& what, std::size_t interval,
                  std::vector<double> trial_nodes)
      : std::runtime_error(what),
        interval_(interval),
        trials_(std::move(trial_nodes)) {}
  std::size_t interval() const noexcept { return interval_; }
  const std::vector<double>& trial_nodes() const noexcept { return trials_; }

 private:
  std::size_t interval_;
  std::vector<double> trials_;
};

/// The required time step cannot be represented in double precision.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, double alpha, double tol)
      : std::runtime_error(what), alpha_(alpha), tol_(tol) {}
  double alpha() const noexcept { return alpha_; }
  double tol() const noexcept { return tol_; }

 private:
  double alpha_;
  double tol_;
};

/// Malformed experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fracadapt
