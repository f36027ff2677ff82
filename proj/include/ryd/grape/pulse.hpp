#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ryd/core/propagate.hpp"
#include "ryd/core/types.hpp"
#include "ryd/model/hamiltonian.hpp"

namespace ryd::grape {

enum class Envelope { kCosineTapered, kFlat };

// Piecewise-constant controls on N uniform segments; segment j is centred at
// t_j = (j + 1/2) dt with dt = T / N.
struct PulseProfile {
  double duration_us = 0.0;
  double omega_plateau = 0.0;
  Envelope envelope = Envelope::kCosineTapered;
  double ramp_fraction = 0.15;  // of T, for each of the rising and falling edges
  Eigen::VectorXd omega;
  Eigen::VectorXd delta;
  Eigen::VectorXd phi;  // empty means zero phase

  int segments() const { return static_cast<int>(delta.size()); }
  double dt() const { return duration_us / segments(); }
  double midpoint(int j) const { return (j + 0.5) * dt(); }
  double phase(int j) const { return phi.size() == 0 ? 0.0 : phi[j]; }

  // Linear detuning ramp from delta_start to delta_end (inclusive of the end
  // segments) under the given envelope.
  static PulseProfile linear_ramp(int segments, double duration_us, double omega_plateau, double delta_start,
                                  double delta_end, Envelope envelope = Envelope::kCosineTapered,
                                  double ramp_fraction = 0.15);

  // Keeps the detuning values per segment and re-samples the envelope for the
  // new duration, so dt grows with T at fixed N.
  void set_duration(double duration_us);
  void validate() const;
};

// Envelope value at time t of a pulse of length T. The cosine-tapered window
// is 0 at both ends and equals omega_plateau in the interior.
double envelope_value(Envelope envelope, double omega_plateau, double ramp_fraction, double duration_us, double t);

// Crossing times of delta(t)/omega(t) through `threshold` restricted to the
// plateau, using linear interpolation between segment midpoints.
std::vector<double> sweep_profile_report(const PulseProfile& pulse, double threshold = 1.3);

// CSV "t_us, omega_rad_per_us, delta_rad_per_us, phi_rad" preceded by
// "# key=value" comment lines.
void write_pulse_csv(std::ostream& os, const PulseProfile& pulse, const std::map<std::string, std::string>& header);
PulseProfile read_pulse_csv(std::istream& is);

// One propagation segment per pulse segment; gamma > 0 adds the no-jump decay term.
std::vector<Segment> pulse_segments(const PulseProfile& pulse, const RydbergHamiltonian& ham, double gamma = 0.0);

}  // namespace ryd::grape
