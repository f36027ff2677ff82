#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "ryd/core/types.hpp"

namespace ryd {

struct KrylovOptions {
  double tolerance = 1e-10;  // relative, per unit of the requested time
  int max_dim = 40;
  int max_substeps = 100000;
};

struct KrylovReport {
  int substeps = 0;
  int matvecs = 0;
};

// v <- exp(-i t A) v for an operator given only through apply(x, y): y = A x.
//
// Adaptive substepping uses the a-posteriori estimate
// beta * h_{m+1,m} * |e_m^T exp(-i tau H_m) e_1| against a budget proportional
// to the substep length. If sample_times is given (ascending, in (0, |t|]),
// samples[q] receives the state after |time| sample_times[q] along the same
// direction; these come from the Krylov bases already built, at no extra
// operator applications.
template <class Apply>
KrylovReport krylov_expv(Apply&& apply, Eigen::VectorXcd& v, double t, bool hermitian, const KrylovOptions& opt = {},
                         std::span<const double> sample_times = {}, Eigen::VectorXcd* samples = nullptr) {
  KrylovReport report;
  const Index n = v.size();
  if (t == 0.0 || n == 0) return report;
  const double total = std::abs(t);
  const double sign = t > 0 ? 1.0 : -1.0;
  const int mmax = static_cast<int>(std::min<Index>(opt.max_dim, n));

  Eigen::MatrixXcd basis(n, mmax + 1);
  Eigen::MatrixXcd hess(mmax + 1, mmax);
  Eigen::VectorXcd x(n), w(n), proj(mmax);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  Eigen::MatrixXcd small;
  int m = 0;

  // exp(-i sign s H_m) e_1 for the current Krylov dimension m
  auto coefficients = [&](double s) -> Eigen::VectorXcd {
    if (hermitian) {
      const Eigen::MatrixXd& q = tri.eigenvectors();
      Eigen::VectorXcd phase = (tri.eigenvalues().cast<Complex>() * (-kI * sign * s)).array().exp();
      return q.cast<Complex>() * phase.cwiseProduct(q.row(0).transpose().cast<Complex>());
    }
    Eigen::MatrixXcd e = (-kI * sign * s) * small;
    return e.exp().col(0);
  };
  auto prepare = [&]() {
    if (hermitian) {
      Eigen::VectorXd d = hess.diagonal().head(m).real();
      Eigen::VectorXd e = hess.diagonal(-1).head(m - 1).real();
      tri.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
    } else {
      small = hess.topLeftCorner(m, m);
    }
  };

  std::size_t next_sample = 0;
  double done = 0.0;
  double tau = total;
  while (done < total * (1.0 - 1e-15)) {
    if (++report.substeps > opt.max_substeps) {
      throw ConvergenceError("Krylov propagation exceeded the substep cap", total - done);
    }
    const double beta = v.norm();
    if (beta == 0.0) break;
    const double remaining = total - done;
    tau = std::min(tau, remaining);

    basis.col(0) = v / beta;
    hess.setZero();

    double step = 0.0;
    Eigen::VectorXcd c;
    for (int j = 0; j < mmax; ++j) {
      x = basis.col(j);
      apply(x, w);
      ++report.matvecs;
      // classical Gram-Schmidt applied twice, as block products
      for (int pass = 0; pass < 2; ++pass) {
        proj.head(j + 1).noalias() = basis.leftCols(j + 1).adjoint() * w;
        w.noalias() -= basis.leftCols(j + 1) * proj.head(j + 1);
        hess.col(j).head(j + 1) += proj.head(j + 1);
      }
      const double hn = w.norm();
      hess(j + 1, j) = hn;
      m = j + 1;
      const double scale = std::max(1.0, hess.col(j).head(m).cwiseAbs().maxCoeff());
      const bool breakdown = hn <= 1e-13 * scale;
      if (!breakdown) basis.col(j + 1) = w / hn;
      if (!breakdown && m < mmax && (m < 4 || m % 2 != 0)) continue;

      prepare();
      if (breakdown) {
        // invariant subspace: exact for any time
        step = remaining;
        c = coefficients(step);
        break;
      }
      c = coefficients(tau);
      double err = beta * hn * std::abs(c[m - 1]);
      if (err <= opt.tolerance * beta * tau / total) {
        step = tau;
        break;
      }
      if (m < mmax) continue;
      // out of Krylov dimension: shrink the step on the existing basis
      double shrink = tau;
      for (int attempt = 0; attempt < 60 && err > opt.tolerance * beta * shrink / total; ++attempt) {
        shrink *= 0.5;
        c = coefficients(shrink);
        err = beta * hn * std::abs(c[m - 1]);
      }
      if (err > opt.tolerance * beta * shrink / total) {
        throw ConvergenceError("Krylov step could not meet the tolerance", err / beta);
      }
      step = shrink;
      tau = shrink;
    }

    const double end = done + step;
    while (samples != nullptr && next_sample < sample_times.size() &&
           sample_times[next_sample] <= end * (1.0 + 1e-14)) {
      samples[next_sample] = beta * (basis.leftCols(m) * coefficients(sample_times[next_sample] - done));
      ++next_sample;
    }
    v.noalias() = beta * (basis.leftCols(m) * c);
    done = step >= remaining ? total : end;
    // grow again when the step fit below the maximal dimension
    if (m < mmax) tau = std::min(2.0 * tau, total);
  }
  while (samples != nullptr && next_sample < sample_times.size()) samples[next_sample++] = v;
  return report;
}

}  // namespace ryd
