#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "ryd/core/random.hpp"
#include "ryd/model/calibration.hpp"
#include "ryd/model/hamiltonian.hpp"

namespace ryd {
namespace {

TEST(Geometry, LadderLayoutAndCircularIndex) {
  const Geometry g = Geometry::make_ladder(4, 3.7, 3.7);
  ASSERT_EQ(g.size(), 8);
  EXPECT_EQ(g.positions[5], Eigen::Vector2d(2 * 3.7, 3.7));
  std::vector<int> seen(8, 0);
  for (int s : g.circular) ++seen[s];
  for (int c : seen) EXPECT_EQ(c, 1);
  for (std::size_t c = 0; c < g.circular.size(); ++c) {
    const int a = g.circular[c], b = g.circular[(c + 1) % g.circular.size()];
    EXPECT_NEAR(g.distance(a, b), 3.7, 1e-12) << "perimeter step " << c;
  }
  // staggered sign is the checkerboard
  for (int s = 0; s < 8; ++s) EXPECT_EQ(g.staggered_sign(s), ((s / 2 + s % 2) % 2 == 0) ? 1 : -1);
}

TEST(Geometry, FileRoundTrip) {
  const Geometry g = Geometry::make_ladder(3, 3.7, 3.9);
  std::stringstream ss;
  write_geometry(ss, g);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "ladder rungs=3 ax=3.7000000000000002 ay=3.8999999999999999");
  const Geometry back = read_geometry(ss);
  ASSERT_TRUE(back.ladder);
  EXPECT_EQ(back.positions, g.positions);
  EXPECT_EQ(back.circular, g.circular);
}

TEST(Geometry, RejectsCoincidentAtoms) {
  const Geometry g = Geometry::from_positions({{0, 0}, {1, 0}, {0, 0}});
  EXPECT_THROW(g.validate(), SingularInteractionError);
  EXPECT_THROW(RydbergHamiltonian(full_basis(3), g, InteractionModel{}), SingularInteractionError);
}

TEST(Disorder, ZeroIsExactAndSeedIsReproducible) {
  const Geometry g = Geometry::make_ladder(4, 3.7, 3.7);
  EXPECT_EQ(sample_disordered_geometry(g, {0.0, 3}).positions, g.positions);
  EXPECT_EQ(sample_disordered_geometry(g, {60.0, 3}).positions, sample_disordered_geometry(g, {60.0, 3}).positions);
  EXPECT_NE(sample_disordered_geometry(g, {60.0, 3}).positions, sample_disordered_geometry(g, {60.0, 4}).positions);
}

TEST(Disorder, MomentsMatchSigma) {
  const Geometry g = Geometry::from_positions({{0, 0}});
  const int samples = 10000;
  double sx = 0, sxx = 0, sy = 0, syy = 0;
  for (int k = 0; k < samples; ++k) {
    const auto p = sample_disordered_geometry(g, {60.0, derive_seed(1, k)}).positions[0];
    sx += p.x();
    sxx += p.x() * p.x();
    sy += p.y();
    syy += p.y() * p.y();
  }
  const double sigma = 0.060;
  EXPECT_LT(std::abs(sx / samples), 5 * sigma / std::sqrt(samples));
  EXPECT_LT(std::abs(sy / samples), 5 * sigma / std::sqrt(samples));
  EXPECT_NEAR(std::sqrt(sxx / samples), sigma, 0.03 * sigma);
  EXPECT_NEAR(std::sqrt(syy / samples), sigma, 0.03 * sigma);
}

TEST(Interaction, TwoAtomsAndScale) {
  const InteractionModel m;
  const Geometry g = Geometry::from_positions({{0, 0}, {3.7, 0}});
  EXPECT_NEAR(m.pair(g, 0, 1), m.c6 / std::pow(3.7, 6), 1e-12);
  EXPECT_NEAR(to_mhz(m.pair(g, 0, 1)), 8.0, 0.01);
  EXPECT_NEAR(to_mhz(m.c6 / std::pow(std::sqrt(2.0) * 3.7, 6)), 1.0, 0.01);
  EXPECT_EQ(m.scale(1.234), 1.0);
}

TEST(Interaction, TablePeriodicity) {
  const InteractionModel m = anisotropic_model(kDefaultC6, 0.0, 1.2, 12);
  for (double th : {0.0, 0.3, 1.0, 1.5707963, 2.9}) {
    EXPECT_NEAR(m.scale(th), m.scale(th + kPi), 1e-12);
    EXPECT_NEAR(m.scale(th), m.scale(th - kPi), 1e-12);
  }
  EXPECT_NEAR(m.scale(0.5 * kPi), 1.2, 1e-12);
  EXPECT_NEAR(m.scale(0.0), 1.0, 1e-12);
  const Geometry g = Geometry::from_positions({{0.3, 1.0}, {4.0, -2.0}});
  EXPECT_DOUBLE_EQ(m.pair(g, 0, 1), m.pair(g, 1, 0));
}

TEST(Hamiltonian, PairEnergyAndPureDiagonal) {
  const Geometry g = Geometry::from_positions({{0, 0}, {3.7, 0}});
  const InteractionModel m;
  const auto b = full_basis(2);
  const Eigen::MatrixXcd h = build_hamiltonian(g, m, 0.0, 0.0, b).dense();
  const Index rr = b->index(BasisConfig::from_string("11"));
  EXPECT_NEAR(h(rr, rr).real(), m.c6 / std::pow(3.7, 6), 1e-9);
  EXPECT_NEAR((h - Eigen::MatrixXcd(h.diagonal().asDiagonal())).norm(), 0.0, 0.0);
}

TEST(Hamiltonian, SquareCheckerboardEnergy) {
  const double a = 3.7;
  const Geometry g = Geometry::make_ladder(2, a, a);
  const InteractionModel m;
  // brute force over all pairs of the config with one diagonal pair excited
  const BasisConfig c = g.checkerboard();
  double brute = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (c.excited(i) && c.excited(j)) brute += m.c6 / std::pow((g.positions[i] - g.positions[j]).norm(), 6);
  EXPECT_NEAR(brute, m.c6 / (8 * std::pow(a, 6)), 1e-9);
  const RydbergHamiltonian h(full_basis(4), g, m);
  EXPECT_NEAR(h.interaction_diagonal()[h.basis()->index(c)], brute, 1e-9);
}

TEST(Hamiltonian, DenseIsHermitian) {
  const Geometry g = sample_disordered_geometry(Geometry::make_ladder(4, 3.7, 3.7), {60.0, 2});
  const auto b = full_basis(8);
  const Eigen::MatrixXcd h = RydbergHamiltonian(b, g, InteractionModel{}).at(mhz(3.0), mhz(1.0), 0.4).dense();
  EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Hamiltonian, EnergyInvariantUnderRigidMotion) {
  const Geometry g = sample_disordered_geometry(Geometry::make_ladder(3, 3.7, 3.7), {200.0, 5});
  Geometry moved = g;
  const double c = std::cos(0.8), s = std::sin(0.8);
  for (auto& p : moved.positions) p = Eigen::Vector2d(c * p.x() - s * p.y() + 2.0, s * p.x() + c * p.y() - 7.0);
  const InteractionModel m;
  const auto b = full_basis(6);
  const RydbergHamiltonian h1(b, g, m), h2(b, moved, m);
  EXPECT_LT((h1.interaction_diagonal() - h2.interaction_diagonal()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Calibration, TwoPhotonShift) {
  const InteractionModel m;
  const Geometry g = Geometry::from_positions({{0, 0}, {3.7, 0}, {7.4, 0}});
  EXPECT_DOUBLE_EQ(two_photon_shift(g, m, 0, 1), 0.5 * m.pair(g, 0, 1));
  EXPECT_NEAR(two_photon_shift(g, m, 0, 2) / two_photon_shift(g, m, 0, 1), 1.0 / 64.0, 1e-12);
  InteractionModel given = m;
  given.c6 = mhz(2.0) * std::pow(3.7, 6);
  EXPECT_NEAR(two_photon_shift(g, given, 0, 1), mhz(1.0), 1e-12);

  const InteractionModel aniso = anisotropic_model(kDefaultC6, 0.0, 1.2);
  const Geometry square = Geometry::from_positions({{0, 0}, {3.7, 0}, {0, 3.7}});
  EXPECT_NEAR(two_photon_shift(square, aniso, 0, 2) / two_photon_shift(square, aniso, 0, 1), 1.2, 1e-12);
}

TEST(Calibration, AnisotropyCompensation) {
  const Geometry g = Geometry::make_ladder(4, 3.7, 3.7);
  EXPECT_NEAR(compensate_anisotropy(g, InteractionModel{}).y_scale, 1.0, 1e-15);

  const double ratio = std::pow(1.03, 6);
  const InteractionModel along_x = anisotropic_model(kDefaultC6, 0.0, ratio);
  const CompensatedLadder c = compensate_anisotropy(g, along_x);
  EXPECT_NEAR(c.y_scale, 1.03, 1e-12);
  const double vx = along_x.pair(c.geometry, 0, 2), vy = along_x.pair(c.geometry, 0, 1);
  EXPECT_NEAR(vy / vx, 1.0, 1e-6);

  const InteractionModel along_y = anisotropic_model(kDefaultC6, 0.5 * kPi, ratio);
  EXPECT_NEAR(compensate_anisotropy(g, along_y).y_scale, 1.0 / 1.03, 1e-12);

  InteractionModel broken = along_x;
  for (auto& p : broken.anisotropy) p.scale = 0.0;
  EXPECT_THROW(compensate_anisotropy(g, broken), InvalidModelError);
}

TEST(Calibration, CompensatedLadderCheckerboardsAreDegenerate) {
  const InteractionModel m = anisotropic_model(kDefaultC6, 0.0, std::pow(1.03, 6));
  const Geometry g = compensate_anisotropy(Geometry::make_ladder(4, 3.7, 3.7), m).geometry;
  const BasisConfig a = g.checkerboard();
  EXPECT_NEAR(interaction_energy(g, m, a), interaction_energy(g, m, a.flipped()), 1e-9);
}

TEST(Calibration, MappingDetuning) {
  const InteractionModel m;
  const Geometry pair = Geometry::from_positions({{0, 0}, {5.0, 0}});
  EXPECT_NEAR(mapping_detuning(pair, m, BasisConfig::from_string("11")), m.c6 / std::pow(5.0, 6), 1e-12);

  const Geometry ladder = Geometry::make_ladder(4, 3.7, 3.7);
  // brute-force mean interaction per excited atom of the checkerboard
  const BasisConfig a = ladder.checkerboard();
  double sum = 0;
  int cnt = 0;
  for (int i = 0; i < 8; ++i) {
    if (!a.excited(i)) continue;
    ++cnt;
    for (int j = 0; j < 8; ++j)
      if (j != i && a.excited(j)) sum += m.c6 / std::pow(ladder.distance(i, j), 6);
  }
  const double d = mapping_detuning(ladder, m);
  EXPECT_NEAR(d, sum / cnt, 1e-9);
  EXPECT_GT(to_mhz(d), 1.0);
  EXPECT_LT(to_mhz(d), 2.5);

  Geometry doubled = ladder;
  for (auto& p : doubled.positions) p *= 2.0;
  EXPECT_NEAR(mapping_detuning(doubled, m), d / 64.0, 1e-12);
}

}  // namespace
}  // namespace ryd
