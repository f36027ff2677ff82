#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ryd/analysis/ghz.hpp"
#include "ryd/analysis/shots.hpp"

namespace ryd::analysis {

struct ParityScan {
  std::vector<double> phi;
  std::vector<double> parity;

  double offset() const;  // uniform-grid average
};

// n equally spaced phases on [0, 2pi)
std::vector<double> uniform_phase_grid(int n = 11);

// Global parity after exp(-i phi sum n_i) and a global pi/2 X rotation,
// evaluated through the anti-diagonal elements rho_{n nbar}.
ParityScan parity_scan(const StateVector& state, const std::vector<double>& phi);
double parity(const StateVector& state, double phi);

// Shot parity (-1)^{#1}; shots with a lost atom are dropped.
double shot_parity(const ShotEnsemble& shots);

// Configs with N/2 excitations other than A and Abar.
std::vector<BasisConfig> offset_partner_set(const GhzTarget& target);

// bits -> population for every config of the state's basis
std::map<std::uint64_t, double> populations(const StateVector& state);
std::map<std::uint64_t, double> populations(const ShotEnsemble& shots);

// Lower bound on 2 Re rho_{A Abar}: offset - sum_{m in S_A} sqrt(P_m P_mbar).
double coherence_lower_bound(const ParityScan& scan, const std::map<std::uint64_t, double>& populations,
                             const GhzTarget& target);

struct OscillationAmplitude {
  double exact = 0.0;  // sum |rho_{n nbar}| over |N_n - N_nbar| = dN
  double bound = 0.0;  // sum sqrt(P_n P_nbar) over the same configs
};
OscillationAmplitude oscillation_amplitude(const StateVector& state, int delta_n);

}  // namespace ryd::analysis
