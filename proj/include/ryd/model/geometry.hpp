#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ryd/core/basis.hpp"

namespace ryd {

struct LadderLattice {
  int rungs = 0;
  double ax_um = 0.0;  // spacing between rungs, along x
  double ay_um = 0.0;  // spacing between the two legs, along y
};

// Ladder sites are numbered 2*rung + leg and sit at (rung*ax, leg*ay).
struct Geometry {
  std::vector<Eigen::Vector2d> positions;
  std::optional<LadderLattice> ladder;
  // circular[c] is the site at position c when walking around the ladder
  // perimeter: leg 0 left to right, then leg 1 right to left.
  std::vector<int> circular;

  static Geometry make_ladder(int rungs, double ax_um, double ay_um);
  static Geometry from_positions(std::vector<Eigen::Vector2d> positions);

  int size() const { return static_cast<int>(positions.size()); }
  double distance(int i, int j) const { return (positions[i] - positions[j]).norm(); }

  // Throws SingularInteractionError on coincident atoms.
  void validate() const;

  // (-1)^c for the site's circular position c. Requires a circular index.
  int staggered_sign(int site) const;

  // Pairs closer than radius_um (inclusive), e.g. blockade edges.
  std::vector<Edge> edges_within(double radius_um) const;

  // Checkerboard config A: every site with even circular position excited.
  BasisConfig checkerboard() const;
};

struct DisorderSampler {
  double sigma_nm = 0.0;
  std::uint64_t seed = 0;
};

Geometry sample_disordered_geometry(const Geometry& geometry, const DisorderSampler& sampler);

// Header "ladder rungs=<k> ax=<um> ay=<um>" for ladders, then "index x_um y_um".
void write_geometry(std::ostream& os, const Geometry& g);
Geometry read_geometry(std::istream& is);

}  // namespace ryd
