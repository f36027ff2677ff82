#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "ryd/gate/gate_sim.hpp"

namespace ryd::gate {
namespace {

const double kOmega = mhz(3.0);
const double kBlockade = mhz(200.0);

const SynthesisResult& synthesized() {
  static const SynthesisResult s = synthesize_tog(kOmega, kBlockade);
  return s;
}

decay::DecayModel no_decay() {
  decay::DecayModel d;
  d.gamma_per_us = 0.0;
  return d;
}

Vector16 basis(int a, int b) {
  Vector16 v = Vector16::Zero();
  v[pair_index(a, b)] = 1.0;
  return v;
}

TEST(MasterEquation, NothingHappensWithoutDriveOrDecay) {
  Vector16 psi = (basis(kM1, kR0) + basis(kM0, kM1)).normalized();
  DensityMatrix4L rho = DensityMatrix4L::pure(psi);
  const DensityMatrix4L out = master_equation_step(rho, SliceControl{}, kBlockade, DecayRates{}, 0.3);
  EXPECT_LT((out.rho - rho.rho).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(MasterEquation, DoublyExcitedPairDecaysIndependently) {
  DecayRates rates;
  rates.to_decayed = 0.7;
  DensityMatrix4L rho = DensityMatrix4L::pure(basis(kR0, kR0));
  const double dt = 0.05;
  for (int k = 1; k <= 40; ++k) {
    rho = master_equation_step(rho, SliceControl{}, kBlockade, rates, dt);
    EXPECT_NEAR(rho.rho(pair_index(kR0, kR0), pair_index(kR0, kR0)).real(), std::exp(-2 * 0.7 * k * dt), 1e-8);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-10);
  }
}

TEST(MasterEquation, SingleChannelFeedsTheTargetLevel) {
  DecayRates rates;
  rates.to_m0 = 0.4;
  DensityMatrix4L rho = DensityMatrix4L::pure(basis(kR0, kM0));
  for (int k = 1; k <= 20; ++k) {
    rho = master_equation_step(rho, SliceControl{}, kBlockade, rates, 0.1);
    const double t = 0.1 * k;
    EXPECT_NEAR(rho.rho(pair_index(kM0, kM0), pair_index(kM0, kM0)).real(), 1 - std::exp(-0.4 * t), 1e-10);
    EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
  }
}

TEST(MasterEquation, DrivenDecayKeepsAValidDensityMatrix) {
  const DecayRates rates = DecayRates::from_model(decay::DecayModel{});
  DensityMatrix4L rho = DensityMatrix4L::pure((basis(kM1, kM1) + basis(kM0, kM1)).normalized());
  for (const SliceControl& c : synthesized().pulse.controls()) {
    rho = master_equation_step(rho, c, kBlockade, rates, synthesized().pulse.dt());
    EXPECT_NO_THROW(rho.validate());
  }
}

TEST(Tog, UncoupledLevelIsUntouched) {
  const Matrix16 u = gate_unitary(synthesized().pulse, kBlockade);
  EXPECT_NEAR(std::abs(u(0, 0) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(u.col(0).squaredNorm(), 1.0, 1e-12);
}

TEST(Tog, SynthesisMeetsTolerance) {
  const SynthesisResult& s = synthesized();
  EXPECT_LT(s.infidelity, 1e-4);
  EXPECT_LT(s.amplitudes.residual_single, 1e-4);
  EXPECT_LT(s.amplitudes.residual_pair, 1e-4);
  EXPECT_NEAR(s.pulse.params.area, 7.6, 0.2);
}

TEST(Tog, ReducedModelMatchesFullUnitary) {
  const SynthesisResult& s = synthesized();
  const Matrix16 u = gate_unitary(s.pulse, kBlockade);
  const double th = s.pulse.compensation;
  EXPECT_LT(std::abs(u(pair_index(kM1, kM0), pair_index(kM1, kM0)) - s.amplitudes.single * std::polar(1.0, -th)), 1e-10);
  EXPECT_LT(std::abs(u(pair_index(kM1, kM1), pair_index(kM1, kM1)) - s.amplitudes.pair * std::polar(1.0, -2 * th)), 1e-10);
}

TEST(Tog, PlusStateBecomesBellEquivalent) {
  const Matrix16 u = gate_unitary(synthesized().pulse, kBlockade);
  Vector16 in = Vector16::Zero();
  for (int q : kQubitIndices) in[q] = 0.5;
  Vector16 ideal = in;
  ideal[pair_index(kM1, kM1)] = -0.5;
  EXPECT_GE(std::norm(ideal.dot(u * in)), 0.9999);
}

TEST(Tog, SwappingAtomsCommutesWithTheGate) {
  const Matrix16 u = gate_unitary(synthesized().pulse, kBlockade);
  Matrix16 swap = Matrix16::Zero();
  for (int a = 0; a < kLevels; ++a)
    for (int b = 0; b < kLevels; ++b) swap(pair_index(b, a), pair_index(a, b)) = 1.0;
  EXPECT_LT((swap * u - u * swap).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Tog, InfiniteBlockadeLimitIsClose) {
  const SynthesisResult inf = synthesize_tog(kOmega, std::numeric_limits<double>::infinity());
  const GateAmplitudes at100 = closed_gate(inf.pulse, 100 * kOmega);
  EXPECT_LT(std::abs(cz_infidelity(at100, best_compensation(at100)) - inf.infidelity), 1e-3);
}

TEST(Tog, WeakBlockadeIsRejected) {
  EXPECT_THROW(synthesize_tog(kOmega, 10 * kOmega), InvalidModelError);
}

TEST(GateFidelity, IdealGateMeetsSynthesisTolerance) {
  GateFidelityOptions o;
  o.haar_states = 100;
  const GateFidelityResult r = simulate_gate_fidelity(synthesized().pulse, NoiseModel::none(), no_decay(), o);
  EXPECT_LT(r.raw_infidelity(), 1e-4);
  EXPECT_NEAR(r.acceptance, 1.0, 1e-4);
}

TEST(GateFidelity, LossDetectionRemovesMostDecayError) {
  GateFidelityOptions o;
  o.haar_states = 200;
  const GateFidelityResult r = simulate_gate_fidelity(synthesized().pulse, NoiseModel::none(), decay::DecayModel{}, o);
  EXPECT_GT(r.raw_infidelity(), 1e-3);
  EXPECT_LT(r.loss_infidelity(), 0.1 * r.raw_infidelity());
}

TEST(GateFidelity, LossDetectedNeverWorseThanRaw) {
  GateFidelityOptions o;
  o.haar_states = 50;
  NoiseModel n = NoiseModel::placeholder();
  n.realizations = 4;
  for (int c = 0; c < kNoiseChannels; ++c) {
    const GateFidelityResult r =
        simulate_gate_fidelity(synthesized().pulse, n.only(static_cast<NoiseChannel>(c)), decay::DecayModel{}, o);
    EXPECT_GE(r.loss_detected, r.raw) << channel_name(static_cast<NoiseChannel>(c));
  }
}

TEST(GateFidelity, NoiseRealizationsAreReproducible) {
  NoiseModel n = NoiseModel::placeholder();
  n.realizations = 3;
  GateFidelityOptions o;
  o.haar_states = 20;
  o.threads = 1;
  const auto a = simulate_gate_fidelity(synthesized().pulse, n, decay::DecayModel{}, o);
  o.threads = 3;
  const auto b = simulate_gate_fidelity(synthesized().pulse, n, decay::DecayModel{}, o);
  EXPECT_EQ(a.raw, b.raw);
  EXPECT_EQ(a.loss_detected, b.loss_detected);
}

TEST(Clifford, GroupHasTwentyFourElements) {
  const auto& g = clifford_group();
  ASSERT_EQ(g.size(), 24u);
  for (const auto& u : g) EXPECT_LT((u.adjoint() * u - Eigen::Matrix2cd::Identity()).norm(), 1e-12);
}

TEST(Grb, IdleGateSucceedsAtEveryDepth) {
  TogPulse idle = synthesized().pulse;
  idle.drive_scale = 0.0;
  idle.compensation = 0.0;
  GrbOptions o;
  o.depths = {3, 5, 9};
  o.instances = 4;
  o.ideal = IdealGate::kIdentity;
  for (bool echo : {false, true}) {
    o.echo = echo;
    const GrbData d = run_grb(idle, NoiseModel::none(), no_decay(), o);
    for (const GrbPoint& p : d.points) EXPECT_NEAR(p.success, 1.0, 1e-12);
  }
}

TEST(Grb, IdealCzReturnsToStart) {
  GrbOptions o;
  o.depths = {3, 6};
  o.instances = 3;
  o.echo = true;
  const GrbData d = run_grb(synthesized().pulse, NoiseModel::none(), no_decay(), o);
  for (const GrbPoint& p : d.points) EXPECT_NEAR(p.success, 1.0, 1e-6);
}

TEST(Grb, DetectionModesOrderUnderDecay) {
  GrbOptions o;
  o.depths = {3, 6, 12};
  o.instances = 4;
  const GrbData d = run_grb(synthesized().pulse, NoiseModel::none(), decay::DecayModel{}, o);
  const auto raw = d.mean_success(GrbDetection::kRaw);
  const auto erasure = d.mean_success(GrbDetection::kErasureDecay);
  const auto loss = d.mean_success(GrbDetection::kLoss);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    EXPECT_LT(raw[k], erasure[k]);
    EXPECT_LT(erasure[k], loss[k]);
  }
  std::ostringstream os;
  write_grb_csv(os, d);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "depth,instance,detection_mode,success");
}

TEST(Grb, DepthsBelowThreeAreRejected) {
  GrbOptions o;
  o.depths = {2, 4};
  EXPECT_THROW(run_grb(synthesized().pulse, NoiseModel::none(), no_decay(), o), InvalidModelError);
}

TEST(CorrelatedLoss, NoDecayNoLoss) {
  LossStatsOptions o;
  o.sequences = 5;
  o.gates = 5;
  const LossStats s = correlated_loss_stats(synthesized().pulse, no_decay(), o);
  // only the synthesis residual is left to ionize
  EXPECT_LT(s.p_single, 1e-7);
  EXPECT_LT(s.p_corr, 1e-7);
}

TEST(CorrelatedLoss, RatesScaleWithGamma) {
  LossStatsOptions o;
  o.sequences = 40;
  o.gates = 10;
  decay::DecayModel d;
  d.gamma_per_us = 1.0 / 120.0;
  const LossStats a = correlated_loss_stats(synthesized().pulse, d, o);
  d.gamma_per_us *= 2;
  const LossStats b = correlated_loss_stats(synthesized().pulse, d, o);
  EXPECT_NEAR(b.p_single / a.p_single, 2.0, 0.05);
  EXPECT_NEAR(b.p_corr / a.p_corr, 2.0, 0.05);
  EXPECT_GT(a.p_corr, 10 * a.p_single * a.p_single);
}

}  // namespace
}  // namespace ryd::gate
