#include "ryd/grape/grape.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "ryd/core/parallel.hpp"
#include "ryd/core/quadrature.hpp"
#include "ryd/core/random.hpp"
#include "ryd/grape/lbfgs.hpp"

namespace ryd::grape {

void GrapeConfig::validate() const {
  if (samples < 1) throw InvalidModelError("GRAPE needs at least one disorder sample");
  if (!(disorder_nm >= 0.0)) throw InvalidModelError("disorder must be non-negative");
  if (!(eta >= 0.0)) throw InvalidModelError("smoothness weight must be non-negative");
  if (!(dT_us > 0.0)) throw InvalidModelError("continuation step must be positive");
  if (max_iterations < 0 || lbfgs_memory < 1 || quadrature_nodes < 1)
    throw InvalidModelError("bad optimizer settings");
}

namespace {

// Penalty detunings are measured in units of the plateau Rabi frequency; a
// pulse with no drive falls back to rad/us.
double penalty_scale(const PulseProfile& pulse) { return pulse.omega_plateau > 0.0 ? pulse.omega_plateau : 1.0; }

// sum_k w_k conj(a_k) b_k with real weights, written out to stay off the
// generic complex multiply
Complex weighted_dot(const Eigen::VectorXcd& a, const Eigen::VectorXd& w, const Eigen::VectorXcd& b) {
  double re = 0.0, im = 0.0;
  for (Index k = 0; k < a.size(); ++k) {
    const double ar = a[k].real(), ai = a[k].imag(), br = b[k].real(), bi = b[k].imag();
    re += w[k] * (ar * br + ai * bi);
    im += w[k] * (ar * bi - ai * br);
  }
  return {re, im};
}

}  // namespace

double smoothness_penalty(const PulseProfile& pulse, double eta) {
  const int n = pulse.segments();
  if (eta == 0.0 || n < 2) return 0.0;
  const double scale = penalty_scale(pulse);
  const Eigen::VectorXd d = pulse.delta.tail(n - 1) - pulse.delta.head(n - 1);
  return eta * n * d.squaredNorm() / (scale * scale);
}

Eigen::VectorXd smoothness_penalty_gradient(const PulseProfile& pulse, double eta) {
  const int n = pulse.segments();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  if (eta == 0.0 || n < 2) return g;
  const double scale = penalty_scale(pulse);
  const double c = 2.0 * eta * n / (scale * scale);
  const Eigen::VectorXd& x = pulse.delta;
  for (int j = 0; j < n; ++j) {
    double v = 0.0;
    if (j > 0) v += x[j] - x[j - 1];
    if (j + 1 < n) v += x[j] - x[j + 1];
    g[j] = c * v;
  }
  return g;
}

GrapeProblem::GrapeProblem(const Geometry& geometry, const InteractionModel& interaction, const GhzTarget& target,
                           const GrapeConfig& config)
    : target_(target), config_(config) {
  config_.validate();
  if (!target_.basis) throw InvalidModelError("GHZ target has no basis");
  if (target_.basis->n_sites() != geometry.size())
    throw InvalidModelError("target basis and geometry have different atom counts");
  initial_index_ = target_.basis->index(0);
  if (initial_index_ < 0) throw InvalidModelError("ground configuration missing from basis");
  // no disorder: every sample is identical, so propagate just one
  const int distinct = config_.disorder_nm > 0.0 ? config_.samples : 1;
  hamiltonians_.reserve(distinct);
  for (int k = 0; k < distinct; ++k) {
    Geometry g = geometry;
    if (config_.disorder_nm > 0.0)
      g = sample_disordered_geometry(geometry, DisorderSampler{config_.disorder_nm, derive_seed(config_.seed, k)});
    hamiltonians_.emplace_back(target_.basis, g, interaction);
  }
}

double GrapeProblem::sample_fidelity(int k, const PulseProfile& pulse, Eigen::VectorXd* grad) const {
  const RydbergHamiltonian& ham = hamiltonians_[k];
  const int n = pulse.segments();
  const double dt = pulse.dt();
  const Index dim = target_.basis->dim();

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi[initial_index_] = 1.0;

  if (!grad) {
    for (int j = 0; j < n; ++j) {
      SegmentPropagator(ham.at(pulse.omega[j], pulse.delta[j], pulse.phase(j)), config_.propagation).apply(psi, dt);
    }
    return std::norm(target_.overlap(psi));
  }

  std::vector<SegmentPropagator> props;
  std::vector<Eigen::VectorXcd> states;
  props.reserve(n);
  states.reserve(n);
  double width = 0.0;
  for (int j = 0; j < n; ++j) {
    props.emplace_back(ham.at(pulse.omega[j], pulse.delta[j], pulse.phase(j)), config_.propagation);
    const auto [lo, hi] = props.back().hamiltonian().spectral_interval();
    width = std::max(width, hi - lo);
    states.push_back(psi);
    props.back().apply(psi, dt);
  }
  const Complex f = target_.overlap(psi);

  // dF/dDelta_j = 2 Re(conj(f) df), df = i int_0^dt <U(dt-s)^dag chi_{j+1}| n |U(s) psi_j> ds.
  // The integrand oscillates at most at the spectral width, hence the node count.
  const int nodes = std::clamp(static_cast<int>(std::ceil(0.3 * width * dt)) + 3, config_.quadrature_nodes, 64);
  const QuadratureRule rule = gauss_legendre(nodes, 0.0, dt);
  std::vector<double> fwd_times(rule.nodes.data(), rule.nodes.data() + nodes);
  std::vector<double> bwd_times(nodes);
  for (int q = 0; q < nodes; ++q) bwd_times[q] = dt - rule.nodes[nodes - 1 - q];
  std::vector<Eigen::VectorXcd> fwd(nodes), bwd(nodes);

  const Eigen::VectorXd& occupation = ham.excitation_numbers();
  Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(dim);
  chi[target_.index_a] += 1.0 / std::sqrt(2.0);
  chi[target_.index_a_bar] += 1.0 / std::sqrt(2.0);

  grad->resize(n);
  for (int j = n - 1; j >= 0; --j) {
    Eigen::VectorXcd tmp = states[j];
    props[j].apply(tmp, fwd_times.back(), fwd_times, fwd.data());
    props[j].apply(chi, -dt, bwd_times, bwd.data());
    Complex df = 0.0;
    for (int q = 0; q < nodes; ++q) {
      const Eigen::VectorXcd& c = bwd[nodes - 1 - q];
      df += rule.weights[q] * weighted_dot(c, occupation, fwd[q]);
    }
    df *= kI;
    (*grad)[j] = 2.0 * std::real(std::conj(f) * df);
  }
  return std::norm(f);
}

CostBreakdown GrapeProblem::evaluate(const PulseProfile& pulse, Eigen::VectorXd* gradient) const {
  pulse.validate();
  const int distinct = distinct_samples();
  std::vector<double> fid(distinct);
  std::vector<Eigen::VectorXd> grads(gradient ? distinct : 0);
  parallel_for(distinct, config_.threads, [&](Index k) {
    try {
      fid[k] = sample_fidelity(static_cast<int>(k), pulse, gradient ? &grads[k] : nullptr);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError("disorder sample " + std::to_string(k) + ": " + e.what(), e.residual());
    }
  });

  CostBreakdown out;
  out.fidelities.resize(config_.samples);
  double sum = 0.0;
  for (int k = 0; k < config_.samples; ++k) {
    out.fidelities[k] = fid[distinct == 1 ? 0 : k];
    sum += out.fidelities[k];
  }
  out.fidelity_mean = sum / config_.samples;
  out.penalty = smoothness_penalty(pulse, config_.eta);
  out.cost = 1.0 - out.fidelity_mean + out.penalty;

  if (gradient) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(pulse.segments());
    for (int k = 0; k < distinct; ++k) mean += grads[k];  // fixed order keeps the sum reproducible
    mean /= distinct;
    *gradient = smoothness_penalty_gradient(pulse, config_.eta) - mean;
  }
  return out;
}

CostBreakdown GrapeProblem::cost(const PulseProfile& pulse) const { return evaluate(pulse, nullptr); }

CostBreakdown GrapeProblem::cost_and_gradient(const PulseProfile& pulse, Eigen::VectorXd& gradient) const {
  return evaluate(pulse, &gradient);
}

CostBreakdown grape_cost(const PulseProfile& pulse, const Geometry& geometry, const InteractionModel& interaction,
                         const GhzTarget& target, const GrapeConfig& config) {
  return GrapeProblem(geometry, interaction, target, config).cost(pulse);
}

Eigen::VectorXd grape_gradient(const PulseProfile& pulse, const Geometry& geometry,
                               const InteractionModel& interaction, const GhzTarget& target, const GrapeConfig& config) {
  Eigen::VectorXd g;
  GrapeProblem(geometry, interaction, target, config).cost_and_gradient(pulse, g);
  return g;
}

OptimizeResult optimize_pulse(const PulseProfile& initial, const Geometry& geometry,
                              const InteractionModel& interaction, const GhzTarget& target, const GrapeConfig& config,
                              const TraceCallback& on_row) {
  initial.validate();
  GrapeProblem problem(geometry, interaction, target, config);

  LbfgsOptions lo;
  lo.max_iterations = config.max_iterations;
  lo.memory = config.lbfgs_memory;
  lo.gradient_tolerance = config.gradient_tolerance;
  lo.cost_tolerance = config.cost_tolerance;
  lo.initial_step = config.initial_step > 0.0 ? config.initial_step : 0.05 * penalty_scale(initial);

  OptimizeResult out;
  out.pulse = initial;
  int iteration = 0;
  auto emit = [&](double cost, const CostBreakdown& c) {
    TraceRow row{iteration, out.pulse.duration_us, cost, c.fidelity_mean, c.penalty};
    out.trace.push_back(row);
    if (on_row) on_row(row);
  };

  const double t0 = initial.duration_us;
  for (int stage = 0;; ++stage) {
    const double T = t0 + stage * config.dT_us;
    if (stage > 0 && T > config.t_final_us + 1e-9) break;
    out.pulse.set_duration(T);

    CostBreakdown last;
    bool first = true;
    auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      PulseProfile p = out.pulse;
      p.delta = x;
      last = problem.cost_and_gradient(p, g);
      if (first) {
        first = false;
        emit(last.cost, last);
      }
      return last.cost;
    };
    auto accept = [&](int, double f, const Eigen::VectorXd&) {
      ++iteration;
      emit(f, last);
    };
    const LbfgsResult r = minimize_lbfgs(fg, out.pulse.delta, lo, accept);
    out.pulse.delta = r.x;
    out.stalled = out.stalled || r.stalled;
    out.stages = stage + 1;
  }
  out.final_cost = problem.cost(out.pulse);
  return out;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  os << "iter,T_us,cost,fidelity_mean,penalty\n";
  os.precision(12);
  for (const TraceRow& r : trace)
    os << r.iteration << ',' << r.duration_us << ',' << r.cost << ',' << r.fidelity_mean << ',' << r.penalty << '\n';
}

}  // namespace ryd::grape
