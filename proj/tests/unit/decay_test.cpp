#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "ryd/decay/decay.hpp"

namespace ryd::decay {
namespace {

const double kGamma = 1.0 / 60.0;

std::vector<double> grid(double step, int n) {
  std::vector<double> t;
  for (int i = 0; i <= n; ++i) t.push_back(step * i);
  return t;
}

StateVector single(double p0) {
  StateVector s(full_basis(1));
  s.amplitudes << std::sqrt(1.0 - p0), std::sqrt(p0);
  return s;
}

TEST(DecayModel, DetectionFidelityByMode) {
  DecayModel m;
  EXPECT_NO_THROW(m.validate());
  EXPECT_NEAR(m.detection_fidelity(DetectionMode::kRydbergQubit), 0.961, 1e-12);
  EXPECT_NEAR(m.detection_fidelity(DetectionMode::kMetastableAndRydberg), 0.931, 1e-12);
  m.branches[0] += 0.1;
  EXPECT_THROW(m.validate(), InvalidModelError);
  EXPECT_NEAR(DecayModel::with_detection(0.1, 0.9).detection_fidelity(), 0.9, 1e-15);
  EXPECT_THROW(DecayModel::with_detection(0.1, 1.2), InvalidModelError);
}

TEST(NoJump, GroundStateIsUntouched) {
  const StateVector m = single(0.0);
  const Operator idle = Operator::diagonal(m.basis, Eigen::VectorXd::Zero(2));
  const StateVector out = no_jump_propagate(m, idle, DecayModel{}, 500.0);
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(out.amplitudes[0]), 1.0, 1e-14);
}

TEST(NoJump, PureDecayNorm) {
  const StateVector r = single(1.0);
  DecayModel d;
  d.gamma_per_us = 0.25;
  // diagonal, sparse and term-list forms of the same idle Hamiltonian
  const Operator diag = Operator::diagonal(r.basis, Eigen::VectorXd::Zero(2));
  SparseMatrix sp(2, 2);
  sp.setIdentity();
  sp *= 0.0;
  TermList t;
  t.diagonal = Eigen::VectorXd::Zero(2);
  for (const Operator& h : {diag, Operator::sparse(r.basis, sp), Operator::terms(r.basis, t)}) {
    const StateVector out = no_jump_propagate(r, h, d, 4.0);
    EXPECT_NEAR(out.norm_squared(), std::exp(-1.0), 1e-10);
  }
}

TEST(NoJump, SuperpositionRenormalizedPopulation) {
  for (double p0 : {0.2, 0.5, 0.9}) {
    const StateVector s = single(p0);
    const Operator idle = Operator::diagonal(s.basis, Eigen::VectorXd::Zero(2));
    for (double t : {10.0, 60.0, 150.0}) {
      const StateVector out = no_jump_propagate(s, idle, DecayModel{}, t);
      const double x = std::exp(-kGamma * t);
      EXPECT_NEAR(std::norm(out.amplitudes[1]) / out.norm_squared(), p0 * x / (1 - p0 + p0 * x), 1e-10);
    }
  }
}

TEST(Trajectories, MatchNoJumpCurveAndConserveWeight) {
  const DecayModel d = DecayModel::with_detection(kGamma, 0.9);
  const auto t = grid(25.0, 8);
  for (double p0 : {0.3, 1.0}) {
    const DecayCurve exact = postselected_decay_curve(p0, d, t);
    const DecayCurve mc = trajectory_decay_curve(p0, d, t, 10000, 3);
    for (std::size_t q = 0; q < t.size(); ++q) {
      const double sigma = std::max(mc.rydberg_err[q], 1e-12);
      EXPECT_LT(std::abs(mc.rydberg[q] - exact.rydberg[q]), 4 * sigma + 1e-12) << p0 << " " << t[q];
      const double acc_sigma = std::sqrt(exact.acceptance[q] * (1 - exact.acceptance[q]) / 10000) + 1e-12;
      EXPECT_LT(std::abs(mc.acceptance[q] - exact.acceptance[q]), 4 * acc_sigma);
    }
  }
}

TEST(Trajectories, OutcomeWeightsSumToOne) {
  const StateVector s = single(0.7);
  const std::vector<Segment> segs{{Operator::diagonal(s.basis, Eigen::VectorXd::Zero(2)), 80.0}};
  DecayModel d;
  int survived = 0, lost = 0, undetected = 0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(5, i));
    const TrajectoryOutcome o = sample_trajectory(s, segs, d, rng);
    (o.fate == Fate::kSurvived ? survived : o.fate == Fate::kLost ? lost : undetected)++;
  }
  EXPECT_EQ(survived + lost + undetected, n);
  // analytic split of the no-jump, detected and undetected weights
  const double keep = 0.3 + 0.7 * std::exp(-kGamma * 80.0);
  const double p = d.detection_fidelity();
  EXPECT_NEAR(keep + p * (1 - keep) + (1 - p) * (1 - keep), 1.0, 1e-12);
  EXPECT_NEAR(double(survived) / n, keep, 4 * std::sqrt(keep * (1 - keep) / n));
  EXPECT_NEAR(double(lost) / n, p * (1 - keep), 4 * std::sqrt(p * (1 - keep) / n));
}

TEST(DecayCurve, PerfectDetectionNeverDecays) {
  const auto fits = decay_curve_analysis(std::vector<double>{1.0}, DecayModel::with_detection(kGamma, 1.0), grid(10, 40));
  ASSERT_EQ(fits.size(), 1u);
  EXPECT_FALSE(fits[0].fit.finite);
  EXPECT_TRUE(std::isinf(fits[0].fit.tau));
  std::ostringstream os;
  write_decay_fits_csv(os, fits);
  EXPECT_EQ(os.str(), "P0,tau_us,tau_err\n1,inf,0\n");
}

TEST(DecayCurve, SmallRydbergFractionDecaysAtGamma) {
  const auto fits =
      decay_curve_analysis(std::vector<double>{1e-4}, DecayModel::with_detection(kGamma, 1.0), grid(2.0, 100));
  EXPECT_NEAR(fits[0].fit.tau, 1.0 / kGamma, 0.01 / kGamma);
}

TEST(DecayCurve, ImpliedDetectionRoundTrips) {
  const auto t = grid(10.0, 40);
  const auto fit = fit_decay_curve(postselected_decay_curve(1.0, DecayModel::with_detection(kGamma, 0.961), t));
  ASSERT_TRUE(fit.fit.finite);
  const ImpliedDetection back = implied_detection_fidelity(fit.fit.tau, fit.fit.tau_err, kGamma, t, fit.points_used);
  EXPECT_NEAR(back.p_det, 0.961, 1e-8);
  EXPECT_GT(back.p_det_err, 0.0);
}

TEST(DecayCurve, LargerRydbergFractionDecaysSlower) {
  const auto fits = decay_curve_analysis(std::vector<double>{0.25, 0.5, 0.75, 1.0},
                                         DecayModel::with_detection(kGamma, 0.961), grid(10.0, 40));
  for (std::size_t i = 1; i < fits.size(); ++i) EXPECT_GT(fits[i].fit.tau, fits[i - 1].fit.tau);
}

struct Pair {
  Geometry geometry = Geometry::from_positions({{0.0, 0.0}, {3.0, 0.0}});
  std::vector<Edge> edges{{0, 1}};
  BasisPtr basis = enumerate_basis(2, BasisMode::kConstrained, edges);
  GhzTarget target = GhzTarget::from_config(basis, BasisConfig::from_string("10"));
};

TEST(ManyBody, NoDecayMeansFullAcceptance) {
  Pair p;
  const double omega = mhz(3.0);
  const auto pulse = grape::PulseProfile::linear_ramp(10, kPi / (std::sqrt(2.0) * omega), omega, 0, 0, grape::Envelope::kFlat);
  DecayModel d;
  d.gamma_per_us = 0.0;
  const PostselectedResult r = postselected_manybody_evolution(pulse, p.geometry, InteractionModel{}, d, p.target);
  EXPECT_NEAR(r.acceptance, 1.0, 1e-13);
  EXPECT_NEAR(r.fidelity_postselected, r.closed_fidelity, 1e-14);
  EXPECT_NEAR(r.closed_fidelity, 1.0, 1e-9);
}

TEST(ManyBody, BlockadedPairAcceptanceFollowsRydbergTime) {
  Pair p;
  const double omega = mhz(3.0);
  const double T = kPi / (std::sqrt(2.0) * omega);
  const auto pulse = grape::PulseProfile::linear_ramp(10, T, omega, 0, 0, grape::Envelope::kFlat);
  const DecayModel d = DecayModel::with_detection(1e-3, 1.0);
  const PostselectedResult r = postselected_manybody_evolution(pulse, p.geometry, InteractionModel{}, d, p.target);
  EXPECT_NEAR(r.fidelity_postselected, r.closed_fidelity, 1e-3);
  // <N(t)> = sin^2(sqrt2 Omega t / 2) averages to 1/2 over the pulse
  EXPECT_NEAR(r.acceptance, std::exp(-d.gamma_per_us * T / 2), 1e-6);
}

TEST(ManyBody, PerfectDetectionGivesNormalizedNoJumpState) {
  const Geometry g = Geometry::make_ladder(2, 3.7, 3.7);
  const BasisPtr b = full_basis(4);
  const GhzTarget target = GhzTarget::checkerboard(b, g);
  const auto pulse = grape::PulseProfile::linear_ramp(40, 1.5, mhz(3.0), -mhz(8.0), mhz(6.0));
  const DecayModel d = DecayModel::with_detection(0.3, 1.0);
  const PostselectedResult r = postselected_manybody_evolution(pulse, g, InteractionModel{}, d, target);
  const RydbergHamiltonian ham(b, g, InteractionModel{});
  std::vector<Segment> segs;
  for (int j = 0; j < pulse.segments(); ++j) segs.push_back({ham.at(pulse.omega[j], pulse.delta[j]), pulse.dt()});
  const StateVector nj = no_jump_propagate(StateVector::ground(b), segs, d).normalized();
  EXPECT_NEAR(r.fidelity_postselected, std::norm(target.overlap(nj.amplitudes)), 1e-12);
}

TEST(ManyBody, TrajectoriesAgreeWithNoJumpAnalysis) {
  const Geometry g = Geometry::make_ladder(2, 3.7, 3.7);
  const BasisPtr b = full_basis(4);
  const GhzTarget target = GhzTarget::checkerboard(b, g);
  const auto pulse = grape::PulseProfile::linear_ramp(30, 1.5, mhz(3.0), -mhz(8.0), mhz(6.0));
  DecayModel d;
  d.gamma_per_us = 0.3;
  for (DetectionMode mode : {DetectionMode::kRydbergQubit, DetectionMode::kMetastableAndRydberg}) {
    const PostselectedResult exact = postselected_manybody_evolution(pulse, g, InteractionModel{}, d, target, mode);
    const PostselectedEstimate mc = trajectory_manybody_evolution(pulse, g, InteractionModel{}, d, target, 2000, 17, 1, mode);
    EXPECT_LT(std::abs(mc.acceptance - exact.acceptance), 3 * mc.acceptance_err + 1e-12);
    EXPECT_LT(std::abs(mc.fidelity_postselected - exact.fidelity_postselected), 3 * mc.fidelity_postselected_err + 1e-12);
  }
}

TEST(ManyBody, AcceptanceFallsWithPulseLength) {
  const Geometry g = Geometry::make_ladder(2, 3.7, 3.7);
  const BasisPtr b = full_basis(4);
  const GhzTarget target = GhzTarget::checkerboard(b, g);
  DecayModel d;
  double prev = 1.0;
  for (double T : {0.5, 1.0, 2.0, 4.0}) {
    const auto pulse = grape::PulseProfile::linear_ramp(40, T, mhz(3.0), -mhz(8.0), mhz(6.0));
    const double acc = postselected_manybody_evolution(pulse, g, InteractionModel{}, d, target).acceptance;
    EXPECT_LT(acc, prev);
    EXPECT_GE(acc, 0.0);
    prev = acc;
  }
}

}  // namespace
}  // namespace ryd::decay
