#include "ryd/model/calibration.hpp"

#include <cmath>

namespace ryd {

double two_photon_shift(const Geometry& geometry, const InteractionModel& interaction, int i, int j) {
  if (i == j) throw Error("two-photon shift needs two distinct atoms");
  return 0.5 * interaction.pair(geometry, i, j);
}

CompensatedLadder compensate_anisotropy(const Geometry& ladder, const InteractionModel& interaction) {
  if (!ladder.ladder) throw InvalidModelError("anisotropy compensation needs a ladder lattice");
  const LadderLattice& l = *ladder.ladder;
  const double along_x = interaction.scale(0.0 - interaction.field_angle_rad);
  const double along_y = interaction.scale(0.5 * kPi - interaction.field_angle_rad);
  if (!(along_x > 0.0) || !(along_y > 0.0)) throw InvalidModelError("anisotropy ratio must be positive");
  // scale_y / (f ay)^6 = scale_x / ax^6
  const double f = std::pow(along_y / along_x, 1.0 / 6.0) * l.ax_um / l.ay_um;
  CompensatedLadder out{ladder, f};
  out.geometry.ladder->ay_um = l.ay_um * f;
  for (auto& p : out.geometry.positions) p.y() *= f;
  return out;
}

double mapping_detuning(const Geometry& geometry, const InteractionModel& interaction, std::optional<BasisConfig> config) {
  const BasisConfig c = config ? *config : geometry.checkerboard();
  if (c.n_sites != geometry.size()) throw Error("config size does not match the geometry");
  double total = 0.0;
  int excited = 0;
  for (int i = 0; i < c.n_sites; ++i) {
    if (!c.excited(i)) continue;
    ++excited;
    for (int j = 0; j < c.n_sites; ++j)
      if (j != i && c.excited(j)) total += interaction.pair(geometry, i, j);
  }
  if (excited == 0) throw Error("mapping detuning needs at least one excited atom");
  return total / excited;
}

}  // namespace ryd
