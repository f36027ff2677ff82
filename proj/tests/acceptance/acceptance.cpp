// Acceptance checks, one line per criterion:
//   acceptance            run all of them
//   acceptance 4 5        run a subset
// Exit status is nonzero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "ryd/analysis/fit.hpp"
#include "ryd/analysis/measurement.hpp"
#include "ryd/analysis/observables.hpp"
#include "ryd/analysis/parity.hpp"
#include "ryd/analysis/shots.hpp"
#include "ryd/core/parallel.hpp"
#include "ryd/core/propagate.hpp"
#include "ryd/core/random.hpp"
#include "ryd/decay/decay.hpp"
#include "ryd/gate/gate_sim.hpp"
#include "ryd/grape/grape.hpp"
#include "ryd/mpp/mpp.hpp"

using namespace ryd;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // records a sub-check; the criterion passes only if all of them do
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAIL]");
  }
  void note(const std::string& what) { detail << (detail.tellp() > 0 ? "; " : "") << what; }
};

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const int kThreads = default_threads();

// ---- 1: exact oracles ----

void criterion1(Outcome& out) {
  const double omega = mhz(2.0);
  const Geometry pair = Geometry::from_positions({{0.0, 0.0}, {3.7, 0.0}});
  const std::vector<Edge> edge{{0, 1}};
  const BasisPtr blockaded = enumerate_basis(2, BasisMode::kConstrained, edge);
  const RydbergHamiltonian ham(blockaded, pair, InteractionModel{});
  const Operator h = ham.at(omega, 0.0);

  // the bright state couples with sqrt(2) Omega / 2, so the level splitting is sqrt(2) Omega
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h.dense()).eigenvalues();
  const double enhancement = (ev.maxCoeff() - ev.minCoeff()) / omega;
  out.check(std::abs(enhancement - std::sqrt(2.0)) < 1e-9,
            fmt("Rabi enhancement %.12f (|err| %.1e < 1e-9)", enhancement, std::abs(enhancement - std::sqrt(2.0))));

  double dyn = 0.0;
  for (double t : {0.05, 0.13, 0.21, 0.4}) {
    const StateVector s = propagate(StateVector::ground(blockaded), h, t);
    const double pr = 1.0 - std::norm(s.amplitudes[blockaded->index(0)]);
    dyn = std::max(dyn, std::abs(pr - std::pow(std::sin(std::sqrt(2.0) * omega * t / 2.0), 2)));
  }
  out.check(dyn < 1e-9, fmt("P_r(t) vs sin^2(sqrt2 Omega t/2) max err %.1e < 1e-9", dyn));

  const double t_bell = kPi / (std::sqrt(2.0) * omega);
  const StateVector bell = propagate(StateVector::ground(blockaded), h, t_bell);
  const Complex w = (bell.amplitude(0b10) + bell.amplitude(0b01)) / std::sqrt(2.0);
  out.check(1.0 - std::norm(w) < 1e-9, fmt("Bell fidelity at area pi/sqrt2: 1-F = %.1e < 1e-9", 1.0 - std::norm(w)));

  const Geometry ladder = Geometry::make_ladder(4, 3.7, 3.7);
  const GhzTarget target = GhzTarget::checkerboard(full_basis(8), ladder);
  const StateVector ghz = target.state();
  double g2_err = 0.0;
  for (const auto& e : analysis::g2_table(ghz, ladder)) g2_err = std::max(g2_err, std::abs(std::abs(e.value) - 0.25));
  const auto mag = analysis::staggered_magnetism(ghz, ladder);
  const auto scan = analysis::parity_scan(ghz, analysis::uniform_phase_grid(18));
  const double bound = analysis::coherence_lower_bound(scan, analysis::populations(ghz), target);
  const double fid = analysis::ghz_fidelity_exact(ghz, target).fidelity;
  const double worst = std::max({g2_err, std::abs(mag.z2_population - 1.0), std::abs(scan.offset() - 1.0),
                                 std::abs(bound - 1.0), std::abs(fid - 1.0)});
  out.check(worst < 1e-10, fmt("perfect GHZ: g2=+-1/4, Z2=1, parity offset=1, bound=1, F=1 (max err %.1e < 1e-10)", worst));
}

// ---- 2: brute-force equivalence ----

void criterion2(Outcome& out) {
  // blockade check: chain with V_nn / Omega = 1e4
  const double omega = mhz(1.0);
  const InteractionModel model;
  const double r = std::pow(model.c6 / (1e4 * omega), 1.0 / 6.0);
  const Geometry chain = Geometry::from_positions({{0, 0}, {r, 0}, {2 * r, 0}, {3 * r, 0}, {4 * r, 0}});
  const BasisPtr full = full_basis(chain.size());
  const BasisPtr cons = enumerate_basis(chain.size(), BasisMode::kConstrained, chain.edges_within(1.01 * r));
  const grape::PulseProfile ramp = grape::PulseProfile::linear_ramp(40, 2.0, omega, -2.0 * omega, 2.0 * omega);
  const StateVector sf = propagate(StateVector::ground(full), grape::pulse_segments(ramp, RydbergHamiltonian(full, chain, model)));
  const StateVector sc = propagate(StateVector::ground(cons), grape::pulse_segments(ramp, RydbergHamiltonian(cons, chain, model)));
  double rr = 0.0;
  Complex overlap = 0.0;
  for (Index k = 0; k < full->dim(); ++k) {
    const Index kc = cons->index(full->bits(k));
    if (kc < 0)
      rr += std::norm(sf.amplitudes[k]);
    else
      overlap += std::conj(sc.amplitudes[kc]) * sf.amplitudes[k];
  }
  const double infid = 1.0 - std::norm(overlap);
  out.check(rr < 1e-4 && infid < 1e-4,
            fmt("V/Omega=1e4: blockade-violating population %.1e, 1-|<c|f>|^2 = %.1e (both < 1e-4)", rr, infid));

  // parity against exp(-i pi/4 sum X) exp(-i phi sum n) and (-1)^{N_r}
  double parity_err = 0.0;
  for (int n : {2, 4, 6}) {
    const BasisPtr b = full_basis(n);
    Rng rng(100 + n);
    std::normal_distribution<double> g;
    StateVector s(b);
    for (Index k = 0; k < s.dim(); ++k) s.amplitudes[k] = Complex(g(rng), g(rng));
    s.normalize();
    const Index d = s.dim();
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(d, d);
    Eigen::VectorXd count(d), sign(d);
    for (Index k = 0; k < d; ++k) {
      count[k] = b->excitations(k);
      sign[k] = b->excitations(k) % 2 == 0 ? 1.0 : -1.0;
      for (int i = 0; i < n; ++i) x(b->flip_site(k, i), k) += 1.0;
    }
    const Eigen::MatrixXcd rot = (Complex(0.0, -kPi / 4.0) * x).exp();
    for (double phi : analysis::uniform_phase_grid(2 * n + 3)) {
      Eigen::VectorXcd v = s.amplitudes;
      for (Index k = 0; k < d; ++k) v[k] *= std::exp(Complex(0.0, -phi * count[k]));
      v = rot * v;
      const double dense = (v.cwiseAbs2().array() * sign.array()).sum();
      parity_err = std::max(parity_err, std::abs(dense - analysis::parity(s, phi)));
    }
  }
  out.check(parity_err < 1e-10, fmt("parity closed form vs dense N=2,4,6: max err %.1e < 1e-10", parity_err));

  // g2 from 1e5 shots, error bars from 50 batches
  const Geometry ladder = Geometry::make_ladder(4, 3.7, 3.7);
  const BasisPtr b8 = full_basis(8);
  const grape::PulseProfile p = grape::PulseProfile::linear_ramp(60, 1.2, mhz(3.0), -mhz(8.0), mhz(6.0));
  const StateVector s8 = propagate(StateVector::ground(b8), grape::pulse_segments(p, RydbergHamiltonian(b8, ladder, model)));
  const int shots = 100000, batches = 50;
  const auto all = analysis::sample_shots(s8, shots, 2024);
  const auto exact = analysis::g2_table(s8, ladder);
  double worst_z = 0.0;
  for (const auto& e : exact) {
    std::vector<double> est;
    for (int k = 0; k < batches; ++k) {
      const analysis::ShotEnsemble part(all.begin() + k * (shots / batches), all.begin() + (k + 1) * (shots / batches));
      est.push_back(analysis::g2(part, ladder, e.dx, e.dy));
    }
    double m = 0.0, v = 0.0;
    for (double x : est) m += x / batches;
    for (double x : est) v += (x - m) * (x - m) / (batches - 1);
    const double sigma = std::sqrt(v / batches);
    const double z = std::abs(analysis::g2(all, ladder, e.dx, e.dy) - e.value) / sigma;
    worst_z = std::max(worst_z, z);
  }
  out.check(worst_z < 5.0, fmt("g2 from 1e5 shots vs exact: worst deviation %.2f sigma < 5", worst_z));
}

// ---- 3: GRAPE gradient ----

void criterion3(Outcome& out) {
  const double omega = mhz(3.0);
  const Geometry ladder = Geometry::make_ladder(3, 3.7, 3.7);
  const GhzTarget target = GhzTarget::checkerboard(full_basis(6), ladder);
  grape::PulseProfile pulse = grape::PulseProfile::linear_ramp(24, 0.9, omega, -1.5 * omega, 2.0 * omega);
  Rng rng(31);
  std::normal_distribution<double> g(0.0, 0.5 * omega);
  for (int j = 0; j < pulse.segments(); ++j) pulse.delta[j] += g(rng);

  for (bool disordered : {false, true}) {
    grape::GrapeConfig c;
    c.samples = disordered ? 4 : 1;
    c.disorder_nm = disordered ? 60.0 : 0.0;
    c.eta = 1e-3;
    c.seed = 17;
    c.threads = kThreads;
    const grape::GrapeProblem problem(ladder, InteractionModel{}, target, c);
    Eigen::VectorXd analytic;
    problem.cost_and_gradient(pulse, analytic);
    const double h = 1e-5;
    double worst = 0.0;  // violation relative to the allowed tolerance
    for (int j = 0; j < pulse.segments(); ++j) {
      grape::PulseProfile a = pulse, b = pulse;
      a.delta[j] += h;
      b.delta[j] -= h;
      const double fd = (problem.cost(a).cost - problem.cost(b).cost) / (2.0 * h);
      worst = std::max(worst, std::abs(analytic[j] - fd) / std::max(1e-4 * std::abs(fd), 1e-7));
    }
    out.check(worst <= 1.0, fmt(disordered ? "N=6 disordered: worst |err|/tol %.3f <= 1" : "N=6 clean: worst |err|/tol %.3f <= 1", worst));
  }
}

// ---- 4 and 5: robustness on the N=8 ladder ----

struct LadderSetup {
  Geometry geometry = Geometry::make_ladder(4, 3.7, 3.7);
  BasisPtr basis = full_basis(8);
  GhzTarget target = GhzTarget::checkerboard(basis, geometry);
  grape::PulseProfile initial = grape::PulseProfile::linear_ramp(150, 1.0, mhz(3.0), -mhz(8.0), mhz(6.0));

  grape::GrapeConfig optimization(double disorder_nm) const {
    grape::GrapeConfig c;
    c.samples = disorder_nm > 0.0 ? 30 : 1;
    c.disorder_nm = disorder_nm;
    c.seed = 5;
    c.t_final_us = 1.6;
    c.dT_us = 0.1;
    c.max_iterations = 60;
    c.threads = kThreads;
    return c;
  }
  // evaluation ensemble: 200 samples at 74 nm, independent of the optimization draws
  grape::GrapeConfig evaluation() const {
    grape::GrapeConfig c;
    c.samples = 200;
    c.disorder_nm = 74.0;
    c.seed = 999;
    c.eta = 0.0;
    c.threads = kThreads;
    return c;
  }
};

const char* kRobustCache = "robust_pulse.csv";

grape::PulseProfile robust_pulse(const LadderSetup& s) {
  if (std::ifstream in(kRobustCache); in) return grape::read_pulse_csv(in);
  const auto r = grape::optimize_pulse(s.initial, s.geometry, InteractionModel{}, s.target, s.optimization(60.0));
  std::ofstream os(kRobustCache);
  grape::write_pulse_csv(os, r.pulse, {{"disorder_nm", "60"}, {"samples", "30"}, {"seed", "5"}});
  return r.pulse;
}

void criterion4(Outcome& out) {
  const LadderSetup s;
  std::remove(kRobustCache);
  const auto clean = grape::optimize_pulse(s.initial, s.geometry, InteractionModel{}, s.target, s.optimization(0.0));
  const grape::PulseProfile robust = robust_pulse(s);
  const double f_clean = grape::grape_cost(clean.pulse, s.geometry, InteractionModel{}, s.target, s.evaluation()).fidelity_mean;
  const double f_robust = grape::grape_cost(robust, s.geometry, InteractionModel{}, s.target, s.evaluation()).fidelity_mean;
  out.note(fmt("clean-optimized F(74 nm) = %.4f, robust-optimized F(74 nm) = %.4f", f_clean, f_robust));
  out.check(f_robust - f_clean >= 0.05, fmt("margin %.1f pp >= 5 pp", 100.0 * (f_robust - f_clean)));
}

void criterion5(Outcome& out) {
  const LadderSetup s;
  const grape::PulseProfile robust = robust_pulse(s);
  const grape::GrapeConfig eval = s.evaluation();
  const auto phis = analysis::uniform_phase_grid(2 * s.geometry.size() + 2);
  std::vector<double> gap(eval.samples), osc(eval.samples), exact(eval.samples);
  parallel_for(eval.samples, kThreads, [&](Index k) {
    const Geometry g = sample_disordered_geometry(s.geometry, DisorderSampler{eval.disorder_nm, derive_seed(eval.seed, k)});
    const StateVector psi =
        propagate(StateVector::ground(s.basis), grape::pulse_segments(robust, RydbergHamiltonian(s.basis, g, InteractionModel{})));
    exact[k] = 2.0 * analysis::ghz_fidelity_exact(psi, s.target).coherence;
    const double bound = analysis::coherence_lower_bound(analysis::parity_scan(psi, phis), analysis::populations(psi), s.target);
    gap[k] = std::abs(exact[k] - bound);
    for (int dn = 2; dn <= s.geometry.size(); dn += 2)
      osc[k] = std::max(osc[k], analysis::oscillation_amplitude(psi, dn).bound);
  });
  double mean_exact = 0.0;
  for (double e : exact) mean_exact += e / eval.samples;
  out.note(fmt("%.0f instances at 74 nm, mean 2Re(rho_AAbar) = %.3f", eval.samples, mean_exact));
  out.check(*std::max_element(gap.begin(), gap.end()) < 0.05,
            fmt("max |bound - 2Re(rho_AAbar)| = %.4f < 0.05", *std::max_element(gap.begin(), gap.end())));
  out.check(*std::max_element(osc.begin(), osc.end()) < 1e-2,
            fmt("max oscillation-amplitude bound = %.1e < 1e-2", *std::max_element(osc.begin(), osc.end())));
}

// ---- 6: non-Hermitian decay ----

void criterion6(Outcome& out) {
  const double gamma = 1.0 / 60.0;
  const decay::DecayModel model = decay::DecayModel::with_detection(gamma, 0.961);
  std::vector<double> t;
  for (int i = 0; i <= 40; ++i) t.push_back(10.0 * i);
  double worst = 0.0;
  const std::vector<double> p0s{0.25, 0.5, 0.75, 1.0};
  for (std::size_t i = 0; i < p0s.size(); ++i) {
    const auto traj = decay::trajectory_decay_curve(p0s[i], model, t, 4000, derive_seed(606, i), kThreads);
    const auto ft = decay::fit_decay_curve(traj);
    // same window and weights on the exact curve
    const auto fe = decay::fit_decay_curve(decay::postselected_decay_curve(p0s[i], model, t), traj.rydberg_err, ft.points_used);
    const double z = std::abs(fe.fit.tau - ft.fit.tau) / ft.fit.tau_err;
    worst = std::max(worst, z);
    out.note(fmt("P0=%.2f tau %.1f vs %.1f us", p0s[i], fe.fit.tau, ft.fit.tau));
  }
  out.check(worst < 3.0, fmt("post-selected vs trajectory tau: worst %.2f sigma < 3", worst));

  const auto fit = decay::fit_decay_curve(decay::postselected_decay_curve(1.0, model, t));
  const auto back = decay::implied_detection_fidelity(fit.fit.tau, fit.fit.tau_err, gamma, t, fit.points_used);
  out.check(fit.fit.finite && std::abs(back.p_det - 0.961) <= back.p_det_err,
            fmt("P0=1 tau = %.1f us, implied p_det = %.5f +- %.5f (target 0.961)", fit.fit.tau, back.p_det, back.p_det_err));
}

// ---- 7: gate suite ----

void criterion7(Outcome& out) {
  const gate::SynthesisResult syn = gate::synthesize_tog(mhz(3.0), mhz(200.0));
  out.check(syn.infidelity < 1e-4, fmt("TOG closed infidelity %.1e < 1e-4", syn.infidelity));

  gate::GateFidelityOptions fo;
  fo.threads = kThreads;
  fo.seed = 71;
  const decay::DecayModel decay_model;
  const auto d = gate::simulate_gate_fidelity(syn.pulse, gate::NoiseModel::none(), decay_model, fo);
  out.check(d.loss_infidelity() < 0.1 * d.raw_infidelity(),
            fmt("decay only: loss-detected %.2e < 0.1 x raw %.2e", d.loss_infidelity(), d.raw_infidelity()));

  // synthetic success curves with the quarter offset
  const std::vector<double> depths{4, 8, 16, 24, 32, 48, 64};
  const double p_true = 0.99;
  std::vector<double> clean, noisy;
  Rng rng(7);
  for (double l : depths) {
    const double s = 0.75 * std::pow(p_true, l) + 0.25;
    clean.push_back(s);
    noisy.push_back(std::binomial_distribution<int>(300, s)(rng) / 300.0);
  }
  const auto f0 = analysis::fit_rb(depths, clean, analysis::RbOffset::kQuarter);
  const auto f1 = analysis::fit_rb(depths, noisy, analysis::RbOffset::kQuarter);
  out.check(std::abs(f0.p - p_true) < 1e-10, fmt("synthetic gRB noiseless |dp| = %.1e < 1e-10", std::abs(f0.p - p_true)));
  out.check(std::abs(f1.p - p_true) / p_true < 0.01,
            fmt("300 shots/point: p = %.5f, relative error %.2e < 1%%", f1.p, std::abs(f1.p - p_true) / p_true));

  gate::GrbOptions go;
  go.threads = kThreads;
  go.seed = 73;
  const gate::NoiseModel noise = gate::NoiseModel::placeholder();
  const gate::GrbData data = gate::run_grb(syn.pulse, noise, decay_model, go);
  double p[gate::kGrbDetections];
  for (int m = 0; m < gate::kGrbDetections; ++m) p[m] = gate::fit_grb(data, static_cast<gate::GrbDetection>(m)).p;
  out.check(p[0] < p[1] && p[1] < p[2],
            fmt("gRB p: raw %.5f < erasure-decay %.5f < loss %.5f", p[0], p[1], p[2]));

  // reported only: the noise spectra behind the published budget are not available
  gate::NoiseModel budget = noise;
  budget.realizations = 200;
  gate::GateFidelityOptions bo = fo;
  bo.haar_states = 200;
  const auto total = gate::simulate_gate_fidelity(syn.pulse, budget, decay_model, bo);
  out.note(fmt("placeholder-noise totals: raw infidelity %.2e, loss-detected %.2e (reported, not asserted)",
               total.raw_infidelity(), total.loss_infidelity()));
}

// ---- 8: correlated loss ----

void criterion8(Outcome& out) {
  const gate::SynthesisResult syn = gate::synthesize_tog(mhz(3.0), mhz(200.0));
  gate::LossStatsOptions lo;
  lo.threads = kThreads;
  lo.seed = 81;
  const gate::LossStats s = gate::correlated_loss_stats(syn.pulse, decay::DecayModel{}, lo);
  out.note(fmt("p_single = %.2e +- %.1e", s.p_single, s.p_single_err) + fmt(", p_corr = %.2e +- %.1e", s.p_corr, s.p_corr_err));
  out.check(s.p_corr > 10.0 * s.p_single * s.p_single, fmt("p_corr > 10 p_single^2 = %.1e", 10.0 * s.p_single * s.p_single));
  out.check(s.p_corr > 0.1 * s.p_single && s.p_corr < 10.0 * s.p_single,
            fmt("p_corr / p_single = %.2f within [0.1, 10]", s.p_corr / s.p_single));
}

// ---- 9: measurement correction ----

// readout probabilities derived from the published state-preparation-and-measurement table
const analysis::MeasurementMatrix kReadout = analysis::MeasurementMatrix::from_readout(0.949, 0.0070, 0.0018, 0.969);

struct BellEstimate {
  double populations = 0.0;  // P00 + P11
  double amplitude = 0.0;    // parity oscillation amplitude
  double fidelity() const { return 0.5 * (populations + amplitude); }
};

// raw or corrected counts -> normalized distribution
using Correction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

BellEstimate bell_estimate(const Eigen::Matrix4cd& rho, const Correction& correct) {
  const Eigen::MatrixXd readout = analysis::measurement_operator(kReadout, 2);
  auto measured = [&](const Eigen::Matrix4cd& r) {
    const Eigen::VectorXd truth = 1e5 * r.diagonal().real();
    Eigen::VectorXd c = correct(readout * truth);
    return Eigen::VectorXd(c / c.sum());
  };
  BellEstimate e;
  const Eigen::VectorXd pop = measured(rho);
  e.populations = pop[0] + pop[3];

  Eigen::Matrix4cd x = Eigen::Matrix4cd::Zero();
  for (int k = 0; k < 4; ++k) {
    x(k ^ 1, k) += 1.0;
    x(k ^ 2, k) += 1.0;
  }
  const Eigen::Matrix4cd rot = (Complex(0.0, -kPi / 4.0) * x).exp();
  const int points = 16;
  Complex harmonic = 0.0;
  for (int k = 0; k < points; ++k) {
    const double phi = kTwoPi * k / points;
    Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
    for (int s = 0; s < 4; ++s) u(s, s) = std::exp(Complex(0.0, -phi * ((s & 1) + (s >> 1))));
    const Eigen::VectorXd d = measured(rot * u * rho * u.adjoint() * rot.adjoint());
    const double parity = d[0] - d[1] - d[2] + d[3];
    harmonic += parity * std::exp(Complex(0.0, 2.0 * phi));
  }
  e.amplitude = 2.0 * std::abs(harmonic) / points;
  return e;
}

void criterion9(Outcome& out) {
  double worst = 0.0;
  for (int n : {1, 2, 3, 4}) {
    Rng rng(900 + n);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    Eigen::VectorXd truth(1 << n);
    for (Index k = 0; k < truth.size(); ++k) truth[k] = u(rng);
    const Eigen::VectorXd observed = analysis::measurement_operator(kReadout, n) * truth;
    const auto c = analysis::correct_measurement(observed, kReadout, n);
    worst = std::max(worst, (c.counts - truth).cwiseAbs().maxCoeff() / truth.cwiseAbs().maxCoeff());
  }
  out.check(worst < 1e-9, fmt("round trip n=1..4: max relative error %.1e < 1e-9", worst));

  // imperfect Bell state: 94% in |00>,|11>, coherence 0.42
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  rho(0, 0) = rho(3, 3) = 0.47;
  rho(1, 1) = rho(2, 2) = 0.03;
  rho(0, 3) = rho(3, 0) = 0.42;
  auto with = [&](const analysis::MeasurementMatrix& m) {
    return [m](const Eigen::VectorXd& obs) { return analysis::correct_measurement(obs, m, 2).counts; };
  };
  const double f_raw = bell_estimate(rho, [](const Eigen::VectorXd& v) { return v; }).fidelity();
  const double f_full = bell_estimate(rho, with(kReadout)).fidelity();
  const double f_flip_free = bell_estimate(rho, with(kReadout.without_spin_flips())).fidelity();
  out.check(f_full > f_raw, fmt("Bell fidelity raw %.4f -> corrected %.4f (true 0.89)", f_raw, f_full));
  // without the mislabeling terms the correction should do almost nothing:
  // the readout error is dominated by eps01 and eps10
  out.check(std::abs(f_flip_free - f_raw) < 0.003,
            fmt("spin-flip-free correction %.4f, shift from raw %.2e < 0.003", f_flip_free, std::abs(f_flip_free - f_raw)));
}

// ---- 10: MPP ----

void criterion10(Outcome& out) {
  mpp::TrapPair magic;
  magic.k = 1e-9;  // eta -> 0
  const mpp::MppResult r = mpp::simulate_mpp(magic);
  out.check(r.infidelity < 1e-8, fmt("magic, eta->0, resonant: infidelity %.1e < 1e-8", r.infidelity));

  const mpp::TrapPair base;
  const auto ratios = mpp::default_ratio_grid();
  const auto deltas = mpp::default_delta_grid();
  const auto points = mpp::sweep_inhomogeneity(base, ratios, deltas, {}, kThreads);
  int minima = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const mpp::SweepPoint* best = nullptr;
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      const auto& p = points[i * deltas.size() + j];
      if (!best || p.result.infidelity < best->result.infidelity) best = &p;
    }
    minima += best->delta_m == 0.0;
  }
  out.check(minima == int(ratios.size()), fmt("delta_m = 0 is the minimum for %.0f of %.0f ratios", minima, ratios.size()));

  mpp::TrapPair big = base;
  big.n_levels = 25;
  double change = 0.0;
  for (double dm : {0.0, mhz(2e-3)}) {
    mpp::TrapPair a = base, b = big;
    a.delta_m = b.delta_m = dm;
    change = std::max(change, std::abs(mpp::simulate_mpp(a).infidelity - mpp::simulate_mpp(b).infidelity));
  }
  out.check(change < 1e-6, fmt("n_levels 15 -> 25 changes infidelity by %.1e < 1e-6", change));
}

const std::map<int, std::pair<const char*, void (*)(Outcome&)>> kCriteria{
    {1, {"exact oracles", criterion1}},
    {2, {"brute-force equivalence", criterion2}},
    {3, {"GRAPE gradient check", criterion3}},
    {4, {"robust vs clean pulse under 74 nm disorder (N=8)", criterion4}},
    {5, {"coherence-bound saturation (N=8)", criterion5}},
    {6, {"non-Hermitian decay", criterion6}},
    {7, {"gate suite", criterion7}},
    {8, {"correlated loss", criterion8}},
    {9, {"measurement correction", criterion9}},
    {10, {"MPP suite", criterion10}},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& [k, v] : kCriteria) selected.push_back(k);

  bool all_pass = true;
  for (int k : selected) {
    const auto it = kCriteria.find(k);
    if (it == kCriteria.end()) {
      std::cerr << "no criterion " << k << '\n';
      return 2;
    }
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      it->second.second(out);
    } catch (const std::exception& e) {
      out.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << k << ' ' << (out.pass ? "PASS" : "FAIL") << " [" << it->second.first << "] "
              << out.detail.str() << " (" << fmt("%.1f", secs) << " s)" << std::endl;
    all_pass = all_pass && out.pass;
  }
  return all_pass ? 0 : 1;
}
