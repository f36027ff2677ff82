#pragma once

#include <vector>

#include "ryd/model/geometry.hpp"

namespace ryd {

// C6 such that atoms 3.7 um apart interact with 2pi x 8 MHz and diagonal
// neighbours of a 3.7 um square lattice with about 2pi x 1 MHz.
inline constexpr double kDefaultC6 = kTwoPi * 2.0526e4;  // rad/us * um^6
inline constexpr double kDefaultSpacingUm = 3.7;

struct AnisotropyPoint {
  double theta_rad;  // pair axis relative to the quantization field
  double scale;
};

// V_ij = scale(theta_ij) * C6 / |r_i - r_j|^6 with theta measured from the
// field direction. scale is periodic in theta with period pi and linearly
// interpolated between table points; an empty table means isotropic.
struct InteractionModel {
  double c6 = kDefaultC6;
  double field_angle_rad = 0.0;
  std::vector<AnisotropyPoint> anisotropy;

  double scale(double theta_rad) const;
  double pair(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const;
  double pair(const Geometry& g, int i, int j) const { return pair(g.positions[i], g.positions[j]); }
  Eigen::MatrixXd matrix(const Geometry& g) const;

  void validate() const;
};

// Table with scale 1 along the field and `perp` perpendicular to it,
// interpolated as 1 + (perp - 1) sin^2(theta).
InteractionModel anisotropic_model(double c6, double field_angle_rad, double perp_scale, int points = 36);

}  // namespace ryd
