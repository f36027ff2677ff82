#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ryd/analysis/fit.hpp"
#include "ryd/decay/decay.hpp"
#include "ryd/gate/noise.hpp"

namespace ryd::gate {

// A noisy gate with decay for one noise realization: Lindblad slices followed
// by the Z compensation.
class GateChannel {
 public:
  GateChannel(const TogPulse& pulse, const std::vector<SliceControl>& controls, double blockade,
              const DecayRates& rates, int quadrature_nodes = 4);
  void apply(Matrix16& rho) const;
  const std::vector<LindbladSlice>& slices() const { return slices_; }
  const Vector16& compensation() const { return z_; }

 private:
  std::vector<LindbladSlice> slices_;
  Vector16 z_;
};

struct GateFidelityOptions {
  double blockade = mhz(200.0);
  int haar_states = 1000;  // per noise realization
  int quadrature_nodes = 4;
  int threads = 1;
  std::uint64_t seed = 1;  // Haar state draws
};

struct GateFidelityResult {
  double raw = 0.0;  // mean fidelity against CZ
  double raw_std = 0.0;
  double loss_detected = 0.0;  // after projecting onto the m-qubit manifold
  double loss_detected_std = 0.0;
  double acceptance = 0.0;  // mean m-manifold population
  long samples = 0;

  double raw_infidelity() const { return 1.0 - raw; }
  double loss_infidelity() const { return 1.0 - loss_detected; }
  double raw_err() const;
  double loss_err() const;
};

GateFidelityResult simulate_gate_fidelity(const TogPulse& pulse, const NoiseModel& noise,
                                          const decay::DecayModel& decay, const GateFidelityOptions& opt = {});

struct ChannelFidelity {
  std::string channel;
  GateFidelityResult result;
};

// Decay alone, each noise channel alone (without decay), then everything.
std::vector<ChannelFidelity> fidelity_breakdown(const TogPulse& pulse, const NoiseModel& noise,
                                                const decay::DecayModel& decay, const GateFidelityOptions& opt = {});

enum class GrbDetection { kRaw = 0, kErasureDecay, kLoss };
inline constexpr int kGrbDetections = 3;
const char* detection_name(GrbDetection d);

enum class IdealGate { kCz, kIdentity };

// The 24 single-qubit Cliffords on {m0, m1}, up to global phase.
const std::vector<Eigen::Matrix2cd>& clifford_group();

struct GrbOptions {
  std::vector<int> depths{4, 8, 16, 24, 32};  // CZ count per sequence; at least 3
  int instances = 40;
  bool echo = false;  // global X between successive gates
  double single_qubit_error = 0.0;  // depolarizing probability per atom per Clifford layer
  IdealGate ideal = IdealGate::kCz;
  double blockade = mhz(200.0);
  int quadrature_nodes = 4;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct GrbPoint {
  int depth = 0;
  int instance = 0;
  GrbDetection detection = GrbDetection::kRaw;
  double success = 0.0;
  double acceptance = 1.0;
};

struct GrbData {
  std::vector<GrbPoint> points;
  std::vector<int> depths;
  // mean success per depth for one detection mode, in depth order
  std::vector<double> mean_success(GrbDetection d) const;
  std::vector<double> success_sem(GrbDetection d) const;
};

// Random global Clifford layers alternate with the gate; each gate is followed
// by ionization of leftover Rydberg population. The last three gates are
// interleaved with Cliffords R1..R4 chosen to return both atoms to |m0 m0>.
// Each instance draws one noise realization.
GrbData run_grb(const TogPulse& pulse, const NoiseModel& noise, const decay::DecayModel& decay, const GrbOptions& opt);

analysis::RbFit fit_grb(const GrbData& data, GrbDetection d, analysis::RbOffset offset = analysis::RbOffset::kQuarter);

void write_grb_csv(std::ostream& os, const GrbData& data);

struct LossStatsOptions {
  int gates = 20;
  int sequences = 200;  // random global-Clifford sequences averaged over
  double blockade = mhz(200.0);
  std::uint64_t seed = 1;
  int threads = 1;
};

struct LossStats {
  double p_single = 0.0;  // per gate: exactly one atom lost
  double p_single_err = 0.0;
  double p_corr = 0.0;  // per gate: both atoms lost
  double p_corr_err = 0.0;
  std::vector<int> gate_counts;
  std::vector<double> single_cumulative;  // probability of a single loss by gate n
  std::vector<double> corr_cumulative;
};

// Loss statistics over repeated gates separated by random global Cliffords.
// Within each gate the first decay is integrated over its time and channel:
// after a decay into a non-interacting level the partner keeps evolving
// without the blockade, may decay in turn, and any Rydberg population left
// at the end is ionized and lost. Later gates start from the normalized
// no-loss state. Per-gate rates are slopes of the cumulative curves.
LossStats correlated_loss_stats(const TogPulse& pulse, const decay::DecayModel& decay,
                                const LossStatsOptions& opt = {});

}  // namespace ryd::gate
