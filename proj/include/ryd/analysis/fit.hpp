#pragma once

#include <functional>
#include <span>
#include <string>

#include "ryd/core/types.hpp"

namespace ryd::analysis {

using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;
using JacobianFn = std::function<void(const Eigen::VectorXd& x, Eigen::MatrixXd& j)>;

struct LeastSquaresOptions {
  double tolerance = 1e-15;
  int max_evaluations = 4000;
  double diff_step = 1e-7;  // relative step for the central-difference Jacobian
  bool scale_covariance = true;  // multiply by chi^2 / (m - n)
};

struct LeastSquaresResult {
  Eigen::VectorXd x;
  Eigen::MatrixXd covariance;
  double chi2 = 0.0;
  int status = 0;
  bool converged = false;
};

// Levenberg-Marquardt on residuals r(x) of length m. Without a Jacobian a
// central-difference one is used.
LeastSquaresResult least_squares(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd x0, Index m,
                                 const LeastSquaresOptions& opt = {});

struct ExponentialFit {
  double amplitude = 0.0;
  double amplitude_err = 0.0;
  double rate = 0.0;  // 1 / tau
  double rate_err = 0.0;
  double tau = 0.0;  // +inf when the data do not decay
  double tau_err = 0.0;
  bool finite = false;
  bool converged = false;
};

// y = a exp(-x / tau), weighted least squares. Empty weights mean uniform.
ExponentialFit fit_exponential_decay(std::span<const double> x, std::span<const double> y, std::span<const double> weights = {});

enum class RbOffset { kZero, kQuarter, kHalf, kFree };
double rb_offset_value(RbOffset b);

struct RbFit {
  double a = 0.0;
  double a_err = 0.0;
  double p = 1.0;
  double p_err = 0.0;
  double b = 0.0;
  double b_err = 0.0;
  double error_per_gate = 0.0;  // (1 - b)(1 - p)
  double error_per_gate_err = 0.0;
  bool degenerate = false;
  std::string note;
};

// success(l) = a p^l + b
RbFit fit_rb(std::span<const double> depths, std::span<const double> success, RbOffset offset,
             std::span<const double> weights = {});

}  // namespace ryd::analysis
