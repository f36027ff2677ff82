#include "ryd/analysis/ghz.hpp"

namespace ryd {

GhzTarget GhzTarget::from_config(const BasisPtr& basis, const BasisConfig& a) {
  if (a.n_sites != basis->n_sites()) throw Error("GHZ config size does not match the basis");
  GhzTarget t{basis, a, a.flipped(), basis->index(a), basis->index(a.flipped())};
  if (t.index_a < 0 || t.index_a_bar < 0) throw Error("GHZ configs are not part of the basis");
  return t;
}

GhzTarget GhzTarget::checkerboard(const BasisPtr& basis, const Geometry& geometry) {
  if (geometry.size() % 2 != 0) throw Error("checkerboard GHZ target needs an even number of sites");
  return from_config(basis, geometry.checkerboard());
}

StateVector GhzTarget::state() const {
  StateVector s(basis);
  s.amplitudes[index_a] = 1.0 / std::sqrt(2.0);
  s.amplitudes[index_a_bar] = 1.0 / std::sqrt(2.0);
  return s;
}

}  // namespace ryd
