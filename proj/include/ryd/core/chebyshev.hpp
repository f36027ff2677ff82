#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "ryd/core/types.hpp"

namespace ryd {

// J_0(z) .. J_kmax(z) for z >= 0 by Miller's backward recurrence, normalized
// with J_0 + 2 sum_k J_2k = 1.
inline std::vector<double> bessel_j_sequence(double z, int kmax) {
  std::vector<double> out(kmax + 1, 0.0);
  if (z == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const int start = 2 * ((std::max(kmax, static_cast<int>(z)) + 20 + static_cast<int>(std::sqrt(40.0 * (kmax + z)))) / 2);
  double next = 0.0, cur = 1e-300, norm = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = 2.0 * k / z * cur - next;
    next = cur;
    cur = prev;  // now J_{k-1} up to scale
    if (k - 1 <= kmax) out[k - 1] = cur;
    if (k - 1 > 0 && (k - 1) % 2 == 0) norm += 2.0 * cur;
    if (std::abs(cur) > 1e250) {
      // rescale everything seen so far
      for (int i = k - 1; i <= kmax; ++i) out[i] *= 1e-250;
      next *= 1e-250;
      cur *= 1e-250;
      norm *= 1e-250;
    }
  }
  norm += cur;  // J_0
  for (double& v : out) v /= norm;
  return out;
}

struct ChebyshevReport {
  int terms = 0;
};

// v <- exp(-i t H) v for Hermitian H with spectrum inside [lo, hi], by the
// Chebyshev expansion exp(-i t H) = e^{-i t c} sum_k (2 - d_k0) (-i)^k J_k(t r) T_k((H - c)/r).
// The terms T_k v do not depend on t, so sample_times (magnitudes, ascending,
// in (0, |t|]) only add a few vector updates each. The truncation point is
// fixed by the spectral interval and t, so the result is a smooth function of
// the operator's parameters.
template <class Apply>
ChebyshevReport chebyshev_expv(Apply&& apply, Eigen::VectorXcd& v, double t, double lo, double hi,
                               double tolerance = 1e-12, std::span<const double> sample_times = {},
                               Eigen::VectorXcd* samples = nullptr) {
  ChebyshevReport report;
  if (t == 0.0 || v.size() == 0) return report;
  const double sign = t > 0 ? 1.0 : -1.0;
  const double c = 0.5 * (hi + lo);
  const double r = std::max(0.5 * (hi - lo), 1e-12 * std::max(1.0, std::abs(c)));

  // time arguments: the samples, then t itself
  std::vector<double> times;
  if (samples != nullptr) times.assign(sample_times.begin(), sample_times.end());
  times.push_back(std::abs(t));
  const double zmax = times.back() * r;

  // J_k(z) decays faster than geometrically once k > z; keep terms until two
  // consecutive ones are negligible for every time argument.
  const int kmax = static_cast<int>(zmax + 10.0 * std::cbrt(zmax + 1.0) + 30.0);
  std::vector<std::vector<double>> bessel(times.size());
  for (std::size_t q = 0; q < times.size(); ++q) bessel[q] = bessel_j_sequence(times[q] * r, kmax);
  int terms = kmax + 1;
  for (int k = 1; k <= kmax; ++k) {
    if (k <= zmax) continue;
    bool small = true;
    for (const auto& b : bessel) small = small && std::abs(b[k - 1]) <= 0.25 * tolerance && std::abs(b[k]) <= 0.25 * tolerance;
    if (small) {
      terms = k - 1;
      break;
    }
  }
  terms = std::max(terms, 1);
  report.terms = terms;

  // The coefficient (2 - d_k0) (-i sign)^k J_k is real for even k and
  // imaginary for odd k, so each update is a real axpy on the re/im parts.
  std::vector<Eigen::VectorXcd> acc(times.size(), Eigen::VectorXcd::Zero(v.size()));
  Eigen::VectorXcd prev = v, cur(v.size()), next(v.size()), hv(v.size());
  const Index n = v.size();
  auto add = [&](int k, const Eigen::VectorXcd& tk) {
    Eigen::Map<const Eigen::ArrayXXd> x(reinterpret_cast<const double*>(tk.data()), 2, n);
    const double w = k == 0 ? 1.0 : 2.0;
    // (-i sign)^k = s_k * (1 or -i sign)
    const double s_k = (k % 4 == 2 || k % 4 == 3) ? -1.0 : 1.0;
    for (std::size_t q = 0; q < times.size(); ++q) {
      Eigen::Map<Eigen::ArrayXXd> y(reinterpret_cast<double*>(acc[q].data()), 2, n);
      const double a = w * s_k * bessel[q][k];
      if (k % 2 == 0) {
        y += a * x;
      } else {
        // a * (-i sign) * (xr + i xi) = a sign xi - i a sign xr
        y.row(0) += (a * sign) * x.row(1);
        y.row(1) -= (a * sign) * x.row(0);
      }
    }
  };
  add(0, prev);
  if (terms > 1) {
    apply(prev, hv);
    cur = (hv - c * prev) / r;
    add(1, cur);
  }
  for (int k = 2; k < terms; ++k) {
    apply(cur, hv);
    next = 2.0 * (hv - c * cur) / r - prev;
    prev.swap(cur);
    cur.swap(next);
    add(k, cur);
  }
  for (std::size_t q = 0; q < times.size(); ++q) acc[q] *= std::exp(Complex(0.0, -sign * c * times[q]));
  for (std::size_t q = 0; q + 1 < times.size(); ++q) samples[q] = std::move(acc[q]);
  v = std::move(acc.back());
  return report;
}

}  // namespace ryd
