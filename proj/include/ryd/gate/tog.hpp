#pragma once

#include <vector>

#include "ryd/gate/four_level.hpp"

namespace ryd::gate {

// phi(t) = amplitude cos(frequency_ratio * Omega * t - offset) over a gate of
// length area / Omega.
struct TogParameters {
  double amplitude = kTwoPi * 0.1122;
  double frequency_ratio = 1.0431;
  double offset = -0.7318;
  double area = 7.612;  // Omega * tau
};

struct TogPulse {
  double omega = mhz(3.0);
  TogParameters params;
  int slices = 200;
  // scales the drive in every slice; 0 gives an idle window of the same length
  double drive_scale = 1.0;
  // single-qubit Z angle applied to m1 on both atoms after the gate
  double compensation = 0.0;
  // Optional piecewise phase table, one entry per slice; overrides the sinusoid.
  std::vector<double> phase_table;

  void validate() const;
  double duration() const { return params.area / omega; }
  double dt() const { return duration() / slices; }
  // phase of slice j, sampled at the slice midpoint
  double phase(int j) const;
  std::vector<SliceControl> controls() const;
  // pulse area in radians, integral of Omega dt
  double pulse_area() const { return omega * duration(); }
};

// Closed-system action on |m1m0> (equal to |m0m1> by symmetry) and |m1m1>.
struct GateAmplitudes {
  Complex single = 1.0;  // <m1m0|U|m1m0>
  Complex pair = 1.0;    // <m1m1|U|m1m1>
  double residual_single = 0.0;  // Rydberg population left in the |m1m0> run
  double residual_pair = 0.0;
};

GateAmplitudes closed_gate(const TogPulse& pulse, double blockade);

// Average gate infidelity against CZ after the Z compensation theta. Leakage
// out of the qubit subspace counts as error.
double cz_infidelity(const GateAmplitudes& a, double theta);
// the theta making the single-excitation phase vanish
double best_compensation(const GateAmplitudes& a);

struct SynthesisOptions {
  double tolerance = 1e-4;  // required infidelity
  int max_evaluations = 4000;
  double min_blockade_ratio = 50.0;
};

struct SynthesisResult {
  TogPulse pulse;
  double infidelity = 1.0;
  GateAmplitudes amplitudes;
};

// Fits the sinusoid parameters and duration so the closed-system gate is CZ up
// to the returned compensation. Throws ConvergenceError with the best
// infidelity if the tolerance is not reached.
SynthesisResult synthesize_tog(double omega, double blockade, int slices = 200, const SynthesisOptions& opt = {});

// The 16-level unitary of the ideal (noise- and decay-free) pulse, compensation
// included; used to check the reduced calculation.
Matrix16 gate_unitary(const TogPulse& pulse, double blockade);

}  // namespace ryd::gate
