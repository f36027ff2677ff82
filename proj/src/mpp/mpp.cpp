#include "ryd/mpp/mpp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "ryd/core/parallel.hpp"
#include "ryd/core/quadrature.hpp"

namespace ryd::mpp {

void TrapPair::validate() const {
  if (!(omega_g > 0.0) || !(omega_m > 0.0)) throw InvalidModelError("trap frequencies must be positive");
  if (n_levels < 5) throw InvalidModelError("need at least 5 motional levels");
  if (!std::isfinite(delta_m) || !std::isfinite(k) || !std::isfinite(omega_rabi))
    throw InvalidModelError("trap parameters must be finite");
  if (!(hbar_over_mass > 0.0)) throw InvalidModelError("hbar / m must be positive");
}

namespace {

// normalized Hermite functions psi_n(y) for n < count
void hermite_functions(double y, int count, Eigen::Ref<Eigen::VectorXd> out) {
  out[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * y * y);
  if (count > 1) out[1] = std::sqrt(2.0) * y * out[0];
  for (int n = 1; n + 1 < count; ++n)
    out[n + 1] = std::sqrt(2.0 / (n + 1)) * y * out[n] - std::sqrt(double(n) / (n + 1)) * out[n - 1];
}

Eigen::MatrixXcd recoil_with_nodes(const TrapPair& t, int rows, int cols, int nodes) {
  const double am = 1.0 / (std::sqrt(2.0) * t.zero_point(t.omega_m));
  const double ag = 1.0 / (std::sqrt(2.0) * t.zero_point(t.omega_g));
  const double beta = std::sqrt(0.5 * (am * am + ag * ag));
  // With y = beta x the Gaussians of both wavefunctions combine into exp(-y^2),
  // so psi_i(am y / beta) psi_j(ag y / beta) times the scaled weight is bounded.
  const QuadratureRule q = gauss_hermite(nodes);
  const Eigen::VectorXd lambda = hermite_christoffel(q.nodes, nodes);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
  Eigen::VectorXd hm(rows), hg(cols);
  for (int k = 0; k < nodes; ++k) {
    const double y = q.nodes[k];
    hermite_functions(am * y / beta, rows, hm);
    hermite_functions(ag * y / beta, cols, hg);
    const Complex phase = std::polar(lambda[k], t.k * y / beta);
    m.noalias() += (phase * hm.cast<Complex>()) * hg.cast<Complex>().transpose();
  }
  return m * (std::sqrt(am * ag) / beta);
}

Eigen::MatrixXcd converged_recoil(const TrapPair& t, int rows, int cols) {
  int nodes = std::max(64, 2 * std::max(rows, cols) + 32);
  Eigen::MatrixXcd prev = recoil_with_nodes(t, rows, cols, nodes);
  while (nodes <= 512) {
    nodes *= 2;
    Eigen::MatrixXcd next = recoil_with_nodes(t, rows, cols, nodes);
    const double diff = (next - prev).cwiseAbs().maxCoeff();
    if (diff < 1e-12) return next;
    prev = std::move(next);
  }
  throw ConvergenceError("recoil matrix quadrature did not converge", (prev).cwiseAbs().maxCoeff());
}

}  // namespace

Complex recoil_matrix_element(int i, int j, const TrapPair& traps) {
  traps.validate();
  if (i < 0 || j < 0 || i >= traps.n_levels || j >= traps.n_levels)
    throw InvalidModelError("motional level outside the truncation");
  return converged_recoil(traps, i + 1, j + 1)(i, j);
}

Eigen::MatrixXcd recoil_matrix(const TrapPair& traps) {
  traps.validate();
  return converged_recoil(traps, traps.n_levels, traps.n_levels);
}

Complex lamb_dicke_element(int i, int j, double eta) {
  const int lo = std::min(i, j), d = std::abs(i - j);
  // sqrt(lo! / hi!) built up as a product to stay finite
  double ratio = 1.0;
  for (int n = lo + 1; n <= lo + d; ++n) ratio /= std::sqrt(double(n));
  const double mag = std::exp(-0.5 * eta * eta) * std::pow(eta, d) * ratio *
                     std::assoc_laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(d), eta * eta);
  return mag * std::pow(kI, d);
}

void MppPulse::validate() const {
  if (steps < 1 && profile.empty()) throw InvalidModelError("pulse needs at least one step");
  if (!(area > 0.0)) throw InvalidModelError("pulse area must be positive");
  if (initial_level < 0) throw InvalidModelError("initial motional level must be non-negative");
  for (double f : profile)
    if (!(f >= 0.0) || !std::isfinite(f)) throw InvalidModelError("pulse profile must be finite and non-negative");
  if (!profile.empty() && *std::max_element(profile.begin(), profile.end()) == 0.0)
    throw InvalidModelError("pulse profile is identically zero");
}

double MppPulse::amplitude(int s) const {
  if (!profile.empty()) return profile[s];
  if (shape == PulseShape::kSquare) return 1.0;
  const double x = std::sin(kPi * (s + 0.5) / steps);
  return x * x;
}

MppResult simulate_mpp(const TrapPair& traps, const MppPulse& pulse) {
  traps.validate();
  pulse.validate();
  const int n = traps.n_levels;
  if (pulse.initial_level >= n) throw InvalidModelError("initial level outside the truncation");
  const int steps = pulse.profile.empty() ? pulse.steps : static_cast<int>(pulse.profile.size());
  const Eigen::MatrixXcd m = recoil_matrix(traps);

  double mean = 0.0;
  for (int s = 0; s < steps; ++s) mean += pulse.amplitude(s);
  mean /= steps;
  const int n0 = pulse.initial_level;
  const double carrier = pulse.calibrate_carrier ? std::abs(m(n0, n0)) : 1.0;
  if (!(carrier > 0.0)) throw InvalidModelError("carrier matrix element vanishes; cannot calibrate the pulse");
  const double duration = pulse.area / (traps.omega_rabi * carrier * mean);
  const double dt = duration / steps;

  // ground levels first, then metastable
  const int dim = 2 * n;
  Eigen::MatrixXcd h0 = Eigen::MatrixXcd::Zero(dim, dim), coupling = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    h0(j, j) = traps.omega_g * j;
    h0(n + j, n + j) = traps.omega_m * j + traps.delta_m;
  }
  coupling.bottomLeftCorner(n, n) = 0.5 * m;
  coupling.topRightCorner(n, n) = 0.5 * m.adjoint();

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi[n0] = 1.0;
  MppResult out;
  out.duration_us = duration;
  for (int s = 0; s < steps; ++s) {
    const Eigen::MatrixXcd h = h0 + (traps.omega_rabi * pulse.amplitude(s)) * coupling;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd c = es.eigenvectors().adjoint() * psi;
    for (int k = 0; k < dim; ++k) c[k] *= std::exp(-kI * es.eigenvalues()[k] * dt);
    psi = es.eigenvectors() * c;
    out.top_level_population = std::max(out.top_level_population, std::norm(psi[n - 1]) + std::norm(psi[dim - 1]));
  }
  out.truncated = out.top_level_population > 1e-6;
  out.unitarity_error = std::abs(psi.squaredNorm() - 1.0);
  double pm = 0.0, nm = 0.0;
  for (int j = 0; j < n; ++j) {
    pm += std::norm(psi[n + j]);
    nm += j * std::norm(psi[n + j]);
  }
  out.infidelity = 1.0 - pm;
  out.added_quanta = pm > 0 ? nm / pm - n0 : 0.0;
  return out;
}

std::vector<SweepPoint> sweep_pairs(const TrapPair& base, std::span<const std::pair<double, double>> pairs,
                                    const MppPulse& pulse, int threads) {
  if (pairs.empty()) throw InvalidModelError("sweep grid is empty");
  std::vector<SweepPoint> out(pairs.size());
  parallel_for(static_cast<Index>(pairs.size()), threads, [&](Index k) {
    TrapPair t = base;
    t.omega_m = pairs[k].first * base.omega_g;
    t.delta_m = pairs[k].second;
    out[k] = {pairs[k].first, pairs[k].second, simulate_mpp(t, pulse)};
  });
  return out;
}

std::vector<SweepPoint> sweep_inhomogeneity(const TrapPair& base, std::span<const double> ratios,
                                            std::span<const double> deltas, const MppPulse& pulse, int threads) {
  std::vector<std::pair<double, double>> pairs;
  for (double r : ratios)
    for (double d : deltas) pairs.emplace_back(r, d);
  return sweep_pairs(base, pairs, pulse, threads);
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points) {
  os << "omega_ratio,delta_m_rad_per_us,infidelity,added_quanta\n";
  os.precision(12);
  for (const SweepPoint& p : points)
    os << p.omega_ratio << ',' << p.delta_m << ',' << p.result.infidelity << ',' << p.result.added_quanta << '\n';
}

std::vector<double> default_ratio_grid() { return {0.9, 0.95, 1.0, 1.05, 1.1}; }

std::vector<double> default_delta_grid() {
  std::vector<double> d;
  for (double f : {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0}) d.push_back(mhz(f * 1e-3));
  return d;
}

}  // namespace ryd::mpp
