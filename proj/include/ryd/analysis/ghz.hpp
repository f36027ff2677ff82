#pragma once

#include "ryd/core/state.hpp"
#include "ryd/model/geometry.hpp"

namespace ryd {

// (|A> + |Abar>)/sqrt2 for the two checkerboard configs of a geometry.
struct GhzTarget {
  BasisPtr basis;
  BasisConfig a;
  BasisConfig a_bar;
  Index index_a = -1;
  Index index_a_bar = -1;

  static GhzTarget checkerboard(const BasisPtr& basis, const Geometry& geometry);
  static GhzTarget from_config(const BasisPtr& basis, const BasisConfig& a);

  StateVector state() const;
  // <GHZ|psi> without normalizing psi
  Complex overlap(const Eigen::VectorXcd& psi) const {
    return (psi[index_a] + psi[index_a_bar]) / std::sqrt(2.0);
  }
};

}  // namespace ryd
