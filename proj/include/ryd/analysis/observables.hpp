#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ryd/analysis/ghz.hpp"
#include "ryd/analysis/shots.hpp"
#include "ryd/model/geometry.hpp"

namespace ryd::analysis {

// Integer lattice coordinates: (rung, leg) for ladders, otherwise positions
// in units of the smallest pair distance, rounded.
std::vector<Eigen::Vector2i> lattice_coordinates(const Geometry& geometry);

// Ordered pairs (i, j) with r_i = r_j + (dx, dy) in lattice units.
std::vector<std::pair<int, int>> displacement_pairs(const Geometry& geometry, int dx, int dy);

double g2(const StateVector& state, const Geometry& geometry, int dx, int dy);
// Pairs touching a lost site are skipped shot by shot.
double g2(const ShotEnsemble& shots, const Geometry& geometry, int dx, int dy);

struct G2Entry {
  int dx;
  int dy;
  double value;
};
// Every displacement with dx >= 0 present in the geometry (one sign of each +/- pair).
std::vector<G2Entry> g2_table(const StateVector& state, const Geometry& geometry);
std::vector<G2Entry> g2_table(const ShotEnsemble& shots, const Geometry& geometry);

// M = sum_c (-1)^c sigma^z along the circular index; nullopt when a site is lost.
std::optional<int> staggered_magnetism(const ShotRecord& shot, const Geometry& geometry);
int staggered_magnetism(const BasisConfig& config, const Geometry& geometry);

struct MagnetismSummary {
  std::map<int, double> histogram;  // M -> probability (or shot fraction)
  double z2_population = 0.0;       // weight at |M| = N
  double mean = 0.0;
  int used_shots = 0;
};
MagnetismSummary staggered_magnetism(const StateVector& state, const Geometry& geometry);
MagnetismSummary staggered_magnetism(const ShotEnsemble& shots, const Geometry& geometry);

struct GhzFidelity {
  double fidelity = 0.0;
  double population_a = 0.0;
  double population_a_bar = 0.0;
  double coherence = 0.0;  // Re rho_{A Abar}
};

GhzFidelity ghz_fidelity_exact(const StateVector& state, const GhzTarget& target);
GhzFidelity ghz_fidelity_exact(const Eigen::MatrixXcd& rho, const GhzTarget& target);

}  // namespace ryd::analysis
