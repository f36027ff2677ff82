#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ryd/analysis/ghz.hpp"
#include "ryd/core/propagate.hpp"
#include "ryd/grape/pulse.hpp"
#include "ryd/model/hamiltonian.hpp"

namespace ryd::grape {

struct GrapeConfig {
  int samples = 30;
  double disorder_nm = 60.0;
  double eta = 1e-3;
  double dT_us = 0.1;
  double t_final_us = 0.0;  // continuation stops once T reaches this; <= initial T means a single stage
  int max_iterations = 200;  // per stage
  double cost_tolerance = 1e-10;
  double gradient_tolerance = 1e-10;
  int lbfgs_memory = 10;
  double initial_step = 0.0;  // rad/us on the first trial step; 0 picks 5% of the plateau
  std::uint64_t seed = 1;
  int threads = 1;
  int quadrature_nodes = 4;  // minimum per segment, raised automatically for stiff segments
  PropagationOptions propagation;

  void validate() const;
};

struct CostBreakdown {
  double cost = 0.0;
  double penalty = 0.0;
  double fidelity_mean = 0.0;
  std::vector<double> fidelities;  // one per disorder sample, in sample order
};

// eta * N * sum_j (D_{j+1} - D_j)^2 / Omega_plateau^2, i.e. eta times the
// integral of (dDelta/ds)^2 over s = t/T in [0, 1] with Delta measured in
// units of the plateau Rabi frequency.
double smoothness_penalty(const PulseProfile& pulse, double eta);
Eigen::VectorXd smoothness_penalty_gradient(const PulseProfile& pulse, double eta);

// Disorder ensemble and propagation setup shared by cost and gradient calls.
// Samples are drawn once at construction, so repeated calls see the same ensemble.
class GrapeProblem {
 public:
  GrapeProblem(const Geometry& geometry, const InteractionModel& interaction, const GhzTarget& target,
               const GrapeConfig& config);

  CostBreakdown cost(const PulseProfile& pulse) const;
  // Gradient with respect to pulse.delta.
  CostBreakdown cost_and_gradient(const PulseProfile& pulse, Eigen::VectorXd& gradient) const;

  const GrapeConfig& config() const { return config_; }
  int distinct_samples() const { return static_cast<int>(hamiltonians_.size()); }

 private:
  // fidelity of one sample; fills grad (over delta, of the fidelity) when non-null
  double sample_fidelity(int k, const PulseProfile& pulse, Eigen::VectorXd* grad) const;
  CostBreakdown evaluate(const PulseProfile& pulse, Eigen::VectorXd* gradient) const;

  GhzTarget target_;
  GrapeConfig config_;
  std::vector<RydbergHamiltonian> hamiltonians_;
  Index initial_index_;
};

CostBreakdown grape_cost(const PulseProfile& pulse, const Geometry& geometry, const InteractionModel& interaction,
                         const GhzTarget& target, const GrapeConfig& config);
Eigen::VectorXd grape_gradient(const PulseProfile& pulse, const Geometry& geometry,
                               const InteractionModel& interaction, const GhzTarget& target, const GrapeConfig& config);

struct TraceRow {
  int iteration = 0;  // accepted steps, counted across all stages
  double duration_us = 0.0;
  double cost = 0.0;
  double fidelity_mean = 0.0;
  double penalty = 0.0;
};

struct OptimizeResult {
  PulseProfile pulse;
  CostBreakdown final_cost;
  std::vector<TraceRow> trace;
  bool stalled = false;
  int stages = 0;
};

using TraceCallback = std::function<void(const TraceRow&)>;

// Optimizes at the initial T, then repeatedly lengthens T by dT (same N, the
// previous optimum carried over segment by segment) until t_final_us.
OptimizeResult optimize_pulse(const PulseProfile& initial, const Geometry& geometry,
                              const InteractionModel& interaction, const GhzTarget& target, const GrapeConfig& config,
                              const TraceCallback& on_row = {});

// CSV "iter,T_us,cost,fidelity_mean,penalty"
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace ryd::grape
