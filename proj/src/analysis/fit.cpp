#include "ryd/analysis/fit.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/LevenbergMarquardt>

namespace ryd::analysis {

namespace {

struct LmFunctor : Eigen::DenseFunctor<double> {
  LmFunctor(const ResidualFn& r, const JacobianFn& j, int n, int m, double step)
      : Eigen::DenseFunctor<double>(n, m), residual(r), jacobian(j), diff_step(step) {}

  int operator()(const InputType& x, ValueType& f) const {
    Eigen::VectorXd r(values());
    residual(x, r);
    f = r;
    return 0;
  }

  int df(const InputType& x, JacobianType& jac) const {
    jac.resize(values(), inputs());
    if (jacobian) {
      Eigen::MatrixXd j(values(), inputs());
      jacobian(x, j);
      jac = j;
      return 0;
    }
    Eigen::VectorXd xp = x, rp(values()), rm(values());
    for (int k = 0; k < inputs(); ++k) {
      const double h = diff_step * std::max(1.0, std::abs(x[k]));
      xp[k] = x[k] + h;
      residual(xp, rp);
      xp[k] = x[k] - h;
      residual(xp, rm);
      xp[k] = x[k];
      jac.col(k) = (rp - rm) / (2 * h);
    }
    return 0;
  }

  const ResidualFn& residual;
  const JacobianFn& jacobian;
  double diff_step;
};

std::vector<double> unit_weights(std::span<const double> w, std::size_t n) {
  if (w.empty()) return std::vector<double>(n, 1.0);
  if (w.size() != n) throw Error("weights must match the data length");
  for (double v : w)
    if (!(v >= 0.0)) throw Error("weights must be non-negative");
  return {w.begin(), w.end()};
}

}  // namespace

LeastSquaresResult least_squares(const ResidualFn& residual, const JacobianFn& jacobian, Eigen::VectorXd x0, Index m,
                                 const LeastSquaresOptions& opt) {
  const int n = static_cast<int>(x0.size());
  if (m < n) throw Error("least squares needs at least as many residuals as parameters");
  LmFunctor f(residual, jacobian, n, static_cast<int>(m), opt.diff_step);
  Eigen::LevenbergMarquardt<LmFunctor> lm(f);
  lm.setXtol(opt.tolerance);
  lm.setFtol(opt.tolerance);
  lm.setGtol(0.0);
  lm.setMaxfev(opt.max_evaluations);
  LeastSquaresResult out;
  const auto status = lm.minimize(x0);
  out.status = static_cast<int>(status);
  out.x = x0;
  Eigen::VectorXd r(m);
  residual(out.x, r);
  out.chi2 = r.squaredNorm();
  out.converged = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                  status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation;

  Eigen::MatrixXd j(m, n);
  f.df(out.x, j);
  const Eigen::MatrixXd jtj = j.transpose() * j;
  out.covariance = jtj.completeOrthogonalDecomposition().pseudoInverse();
  if (opt.scale_covariance && m > n) out.covariance *= out.chi2 / static_cast<double>(m - n);
  return out;
}

ExponentialFit fit_exponential_decay(std::span<const double> x, std::span<const double> y, std::span<const double> weights) {
  if (x.size() != y.size() || x.size() < 2) throw Error("exponential fit needs at least two matching points");
  const auto w = unit_weights(weights, x.size());
  const Index m = static_cast<Index>(x.size());

  // log-linear start on the positive points
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (Index i = 0; i < m; ++i) {
    if (y[i] <= 0) continue;
    const double ly = std::log(y[i]);
    sw += 1;
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
  }
  double k0 = 0.0, a0 = y[0];
  if (sw >= 2 && sw * sxx - sx * sx > 0) {
    const double slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    k0 = -slope;
    a0 = std::exp((sy - slope * sx) / sw);
  }

  ResidualFn res = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    for (Index i = 0; i < m; ++i) r[i] = std::sqrt(w[i]) * (p[0] * std::exp(-p[1] * x[i]) - y[i]);
  };
  JacobianFn jac = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
    for (Index i = 0; i < m; ++i) {
      const double e = std::exp(-p[1] * x[i]);
      j(i, 0) = std::sqrt(w[i]) * e;
      j(i, 1) = -std::sqrt(w[i]) * p[0] * x[i] * e;
    }
  };
  Eigen::VectorXd p0(2);
  p0 << a0, k0;
  const auto fit = least_squares(res, jac, p0, m);

  ExponentialFit out;
  out.converged = fit.converged;
  out.amplitude = fit.x[0];
  out.rate = fit.x[1];
  out.amplitude_err = std::sqrt(std::max(0.0, fit.covariance(0, 0)));
  out.rate_err = std::sqrt(std::max(0.0, fit.covariance(1, 1)));
  double span = 0;
  for (double v : x) span = std::max(span, std::abs(v));
  out.finite = out.rate * std::max(span, 1e-300) > 1e-12;
  if (out.finite) {
    out.tau = 1.0 / out.rate;
    out.tau_err = out.rate_err / (out.rate * out.rate);
  } else {
    out.tau = std::numeric_limits<double>::infinity();
    out.tau_err = std::numeric_limits<double>::infinity();
  }
  return out;
}

double rb_offset_value(RbOffset b) {
  switch (b) {
    case RbOffset::kZero: return 0.0;
    case RbOffset::kQuarter: return 0.25;
    case RbOffset::kHalf: return 0.5;
    case RbOffset::kFree: break;
  }
  return 0.0;
}

RbFit fit_rb(std::span<const double> depths, std::span<const double> success, RbOffset offset, std::span<const double> weights) {
  if (depths.size() != success.size() || depths.size() < 3) throw Error("RB fit needs at least three depths");
  const auto w = unit_weights(weights, depths.size());
  const Index m = static_cast<Index>(depths.size());
  const bool free_b = offset == RbOffset::kFree;
  const double b_fixed = rb_offset_value(offset);

  // start: b from the tail (free) or fixed, then log-linear on y - b
  double b0 = b_fixed;
  if (free_b) {
    double lo = success[0];
    for (double v : success) lo = std::min(lo, v);
    b0 = std::max(0.0, lo - 0.05);
  }
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (Index i = 0; i < m; ++i) {
    const double v = success[i] - b0;
    if (v <= 0) continue;
    sw += 1;
    sx += depths[i];
    sy += std::log(v);
    sxx += depths[i] * depths[i];
    sxy += depths[i] * std::log(v);
  }
  RbFit out;
  out.b = b0;
  if (sw < 2) {
    out.degenerate = true;
    out.a = 0.0;
    out.note = "success does not rise above the offset";
    return out;
  }
  double p0 = 1.0, a0 = success[0] - b0;
  if (sw * sxx - sx * sx > 0) {
    const double slope = (sw * sxy - sx * sy) / (sw * sxx - sx * sx);
    p0 = std::exp(slope);
    a0 = std::exp((sy - slope * sx) / sw);
  }

  ResidualFn res = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r) {
    const double b = free_b ? q[2] : b_fixed;
    for (Index i = 0; i < m; ++i) r[i] = std::sqrt(w[i]) * (q[0] * std::pow(q[1], depths[i]) + b - success[i]);
  };
  JacobianFn jac = [&](const Eigen::VectorXd& q, Eigen::MatrixXd& j) {
    for (Index i = 0; i < m; ++i) {
      const double sq = std::sqrt(w[i]);
      const double pl = std::pow(q[1], depths[i]);
      j(i, 0) = sq * pl;
      j(i, 1) = depths[i] == 0.0 ? 0.0 : sq * q[0] * depths[i] * std::pow(q[1], depths[i] - 1.0);
      if (free_b) j(i, 2) = sq;
    }
  };
  Eigen::VectorXd q0(free_b ? 3 : 2);
  q0[0] = a0;
  q0[1] = p0;
  if (free_b) q0[2] = b0;
  const auto fit = least_squares(res, jac, q0, m);

  out.a = fit.x[0];
  out.p = fit.x[1];
  out.b = free_b ? fit.x[2] : b_fixed;
  out.a_err = std::sqrt(std::max(0.0, fit.covariance(0, 0)));
  out.p_err = std::sqrt(std::max(0.0, fit.covariance(1, 1)));
  out.b_err = free_b ? std::sqrt(std::max(0.0, fit.covariance(2, 2))) : 0.0;
  out.error_per_gate = (1.0 - out.b) * (1.0 - out.p);
  // first-order propagation, including the b-p covariance for free offsets
  double var = std::pow(1.0 - out.b, 2) * fit.covariance(1, 1);
  if (free_b) {
    var += std::pow(1.0 - out.p, 2) * fit.covariance(2, 2) + 2 * (1.0 - out.b) * (1.0 - out.p) * fit.covariance(1, 2);
  }
  out.error_per_gate_err = std::sqrt(std::max(0.0, var));

  double scale = 0.0;
  for (double v : success) scale = std::max(scale, std::abs(v));
  if (std::abs(out.a) < 1e-6 * std::max(1.0, scale)) {
    out.degenerate = true;
    out.note = "decay amplitude vanishes; p is undetermined";
  } else if (!(out.p > 0.0) || out.p > 1.0 + 1e-9) {
    out.degenerate = true;
    out.note = "fitted p outside (0, 1]";
  } else if (!fit.converged) {
    out.degenerate = true;
    out.note = "fit did not converge";
  }
  return out;
}

}  // namespace ryd::analysis
