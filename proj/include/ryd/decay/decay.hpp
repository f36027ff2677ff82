#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ryd/analysis/fit.hpp"
#include "ryd/analysis/ghz.hpp"
#include "ryd/core/propagate.hpp"
#include "ryd/core/random.hpp"
#include "ryd/grape/pulse.hpp"
#include "ryd/model/hamiltonian.hpp"

namespace ryd::decay {

// Where a Rydberg decay ends up.
enum class Branch { kDetectedLoss = 0, kM0, kM1, kGround, kOther };
inline constexpr int kBranchCount = 5;

// Which qubit manifolds the readout uses. In the r-qubit mode (r0, m1) a decay
// into m0 still reads as loss; with both m- and r-qubits in play it does not.
enum class DetectionMode { kRydbergQubit, kMetastableAndRydberg };

struct DecayModel {
  double gamma_per_us = 1.0 / 60.0;
  // detected loss, m0, m1, ground manifold (removed by the blow-away beam), other
  std::array<double, kBranchCount> branches{0.881, 0.030, 0.035, 0.050, 0.004};

  void validate() const;
  double branch(Branch b) const { return branches[static_cast<int>(b)]; }
  static bool detected(Branch b, DetectionMode mode);
  // share of decays registered as loss
  double detection_fidelity(DetectionMode mode = DetectionMode::kRydbergQubit) const;

  // Two-branch model with the given detection fidelity: detected loss and m1.
  static DecayModel with_detection(double gamma_per_us, double p_det);
};

// H - i (Gamma/2) sum_i n_i for a Hermitian term-list, sparse or diagonal operator.
Operator with_decay(const Operator& h, double gamma_per_us);

// Unnormalized no-jump state; its squared norm is the no-jump probability.
StateVector no_jump_propagate(const StateVector& state, const Operator& h, const DecayModel& decay, double duration_us,
                              const PropagationOptions& opt = {});
StateVector no_jump_propagate(const StateVector& state, std::span<const Segment> segments, const DecayModel& decay,
                              const PropagationOptions& opt = {});

enum class Fate { kSurvived, kLost, kUndetected };

struct TrajectoryOutcome {
  Fate fate = Fate::kSurvived;
  Branch branch = Branch::kDetectedLoss;  // meaningful unless survived
  int site = -1;
  double jump_time_us = 0.0;
  // normalized final state for survivors; the normalized post-jump state for
  // an undetected decay into m1, frozen at the jump time; empty otherwise
  std::optional<StateVector> state;
  double weight = 1.0;
};

// Called with (sample index, normalized state) at each sample time the
// trajectory reaches without a jump.
using TrajectoryObserver = std::function<void(int, const StateVector&)>;

struct TrajectoryOptions {
  DetectionMode mode = DetectionMode::kRydbergQubit;
  PropagationOptions propagation;
  double time_tolerance_us = 1e-9;  // on the located jump time
};

// One quantum-jump trajectory over piecewise-constant Hermitian segments.
// The first jump ends coherent evolution: a detected decay discards the shot,
// an undetected one leaves incoherent population in the destination level.
TrajectoryOutcome sample_trajectory(const StateVector& initial, std::span<const Segment> segments,
                                    const DecayModel& decay, Rng& rng, const TrajectoryOptions& opt = {},
                                    std::span<const double> sample_times = {}, const TrajectoryObserver& observer = {});

// ---- single-atom decay curves ----

struct DecayCurve {
  double p0 = 0.0;
  std::vector<double> times_us;
  std::vector<double> rydberg;      // post-selected P_r(t)
  std::vector<double> rydberg_err;  // Monte-Carlo standard error, zero for the analytic curve
  std::vector<double> acceptance;   // share of shots kept
};

// Post-selected P_r(t) for sqrt(1-P0)|m> + sqrt(P0)|r> without drive, from the
// no-jump state plus the undetected admixture.
DecayCurve postselected_decay_curve(double p0, const DecayModel& decay, std::span<const double> times_us,
                                    DetectionMode mode = DetectionMode::kRydbergQubit);

// Same curve from jump trajectories; detected shots are discarded.
DecayCurve trajectory_decay_curve(double p0, const DecayModel& decay, std::span<const double> times_us,
                                  int trajectories, std::uint64_t seed, int threads = 1,
                                  DetectionMode mode = DetectionMode::kRydbergQubit);

struct DecayFit {
  double p0 = 0.0;
  analysis::ExponentialFit fit;  // tau = inf when the curve does not decay
  int points_used = 0;
};

// Fits P_r(0) exp(-t/tau) on the leading part of the curve above P_r(0)/e,
// or on the first `points` samples when that is positive. Weights come from
// sigma if given, else from the curve's own errors, else uniform.
DecayFit fit_decay_curve(const DecayCurve& curve, std::span<const double> sigma = {}, int points = 0);

std::vector<DecayFit> decay_curve_analysis(std::span<const double> p0_grid, const DecayModel& decay,
                                           std::span<const double> times_us,
                                           DetectionMode mode = DetectionMode::kRydbergQubit);

// Detection fidelity whose simulated P0 = 1 curve, fitted the same way,
// reproduces tau. The fit window is held at `points` samples (0: each curve
// picks its own), which keeps tau(p_det) continuous. The error follows from
// tau_err through the local slope.
struct ImpliedDetection {
  double p_det = 0.0;
  double p_det_err = 0.0;
};
ImpliedDetection implied_detection_fidelity(double tau_us, double tau_err_us, double gamma_per_us,
                                            std::span<const double> times_us, int points = 0,
                                            std::span<const double> sigma = {});

// CSV "P0,tau_us,tau_err"
void write_decay_fits_csv(std::ostream& os, std::span<const DecayFit> fits);

// ---- many-body evolution with loss detection ----

struct PostselectedResult {
  double fidelity_postselected = 0.0;  // among accepted shots
  double fidelity_raw = 0.0;           // every shot counts, lost ones as failures
  double acceptance = 1.0;
  double closed_fidelity = 0.0;  // same pulse without decay
};

PostselectedResult postselected_manybody_evolution(const grape::PulseProfile& pulse, const Geometry& geometry,
                                                   const InteractionModel& interaction, const DecayModel& decay,
                                                   const GhzTarget& target,
                                                   DetectionMode mode = DetectionMode::kRydbergQubit,
                                                   const PropagationOptions& opt = {});

// Trajectory estimate of the same quantities, with standard errors.
struct PostselectedEstimate {
  double fidelity_postselected = 0.0;
  double fidelity_postselected_err = 0.0;
  double acceptance = 0.0;
  double acceptance_err = 0.0;
};
PostselectedEstimate trajectory_manybody_evolution(const grape::PulseProfile& pulse, const Geometry& geometry,
                                                   const InteractionModel& interaction, const DecayModel& decay,
                                                   const GhzTarget& target, int trajectories, std::uint64_t seed,
                                                   int threads = 1, DetectionMode mode = DetectionMode::kRydbergQubit);

}  // namespace ryd::decay
