#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ryd/core/types.hpp"

namespace ryd::mpp {

// hbar / m for 171Yb in um^2/us
inline constexpr double kHbarOverMassYb171 = 3.7154e-4;

struct TrapPair {
  double omega_g = mhz(0.1);  // ground-state trap frequency, rad/us
  double omega_m = mhz(0.1);  // metastable-state trap frequency
  double delta_m = 0.0;       // differential light-shift detuning on |m>, rad/us
  double k = kTwoPi / 0.578;  // drive wavevector along the oscillator axis, 1/um
  int n_levels = 15;
  double omega_rabi = mhz(0.02);  // peak Rabi frequency; the coupling is (Omega/2) <i|e^{ikx}|j>
  double hbar_over_mass = kHbarOverMassYb171;

  void validate() const;
  double zero_point(double omega) const { return std::sqrt(hbar_over_mass / (2.0 * omega)); }
  double lamb_dicke() const { return k * zero_point(omega_g); }
};

// <i|_{omega_m} e^{ikx} |j>_{omega_g} by Gauss-Hermite quadrature. Node count
// doubles until two successive results agree to 1e-12; throws ConvergenceError
// otherwise.
Complex recoil_matrix_element(int i, int j, const TrapPair& traps);
// Rows are metastable levels i, columns ground levels j.
Eigen::MatrixXcd recoil_matrix(const TrapPair& traps);
// Closed form for equal trap frequencies.
Complex lamb_dicke_element(int i, int j, double eta);

enum class PulseShape { kSquare, kSinSquared };

struct MppPulse {
  PulseShape shape = PulseShape::kSinSquared;
  double area = kPi;  // on the carrier of the starting level when calibrated
  int steps = 400;
  bool calibrate_carrier = true;
  int initial_level = 0;
  // Optional amplitude samples (relative to the peak Rabi frequency), one per
  // step; overrides the shape.
  std::vector<double> profile;

  void validate() const;
  double amplitude(int step) const;  // relative amplitude in step s
};

struct MppResult {
  double infidelity = 1.0;    // 1 - P(m manifold)
  double added_quanta = 0.0;  // <n> in the m manifold minus the starting level
  double top_level_population = 0.0;  // max over the evolution
  bool truncated = false;             // top level above 1e-6 at some step
  double unitarity_error = 0.0;
  double duration_us = 0.0;
};

MppResult simulate_mpp(const TrapPair& traps, const MppPulse& pulse = {});

struct SweepPoint {
  double omega_ratio = 1.0;  // omega_m / omega_g
  double delta_m = 0.0;
  MppResult result;
};

// Every (ratio, delta) combination, ratios outermost.
std::vector<SweepPoint> sweep_inhomogeneity(const TrapPair& base, std::span<const double> ratios,
                                            std::span<const double> deltas, const MppPulse& pulse = {},
                                            int threads = 1);
// Explicit (ratio, delta) pairs, e.g. from a wavelength table.
std::vector<SweepPoint> sweep_pairs(const TrapPair& base, std::span<const std::pair<double, double>> pairs,
                                    const MppPulse& pulse = {}, int threads = 1);

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> points);

// Default grid: ratios 0.9..1.1, delta_m / 2pi in -4..4 kHz.
std::vector<double> default_ratio_grid();
std::vector<double> default_delta_grid();

}  // namespace ryd::mpp
