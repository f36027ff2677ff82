#include "ryd/model/hamiltonian.hpp"

namespace ryd {

RydbergHamiltonian::RydbergHamiltonian(BasisPtr basis, const Geometry& geometry, const InteractionModel& interaction,
                                       Eigen::VectorXd site_detuning)
    : basis_(std::move(basis)) {
  const int n = basis_->n_sites();
  if (geometry.size() != n) throw Error("geometry has " + std::to_string(geometry.size()) + " sites, basis has " + std::to_string(n));
  if (site_detuning.size() != 0 && site_detuning.size() != n) throw Error("per-site detuning length does not match the site count");
  geometry.validate();
  const Eigen::MatrixXd v = interaction.matrix(geometry);
  const Index dim = basis_->dim();
  interaction_.resize(dim);
  excitations_.resize(dim);
  std::vector<int> on;
  for (Index k = 0; k < dim; ++k) {
    on.clear();
    for (int i = 0; i < n; ++i)
      if (basis_->excited(k, i)) on.push_back(i);
    double e = 0.0;
    for (std::size_t a = 0; a < on.size(); ++a) {
      if (site_detuning.size() != 0) e -= site_detuning[on[a]];
      for (std::size_t b = a + 1; b < on.size(); ++b) e += v(on[a], on[b]);
    }
    interaction_[k] = e;
    excitations_[k] = static_cast<double>(on.size());
  }
}

Operator RydbergHamiltonian::at(double omega, double delta, double phi, double gamma) const {
  TermList t;
  t.diagonal = interaction_ - delta * excitations_;
  t.drive = 0.5 * omega * std::exp(kI * phi);
  if (gamma > 0.0) t.decay = 0.5 * gamma * excitations_;
  return Operator::terms(basis_, std::move(t));
}

Operator build_hamiltonian(const Geometry& geometry, const InteractionModel& interaction, double omega, double delta,
                           const BasisPtr& basis) {
  return RydbergHamiltonian(basis, geometry, interaction).at(omega, delta);
}

double interaction_energy(const Geometry& geometry, const InteractionModel& interaction, const BasisConfig& config) {
  double e = 0.0;
  for (int i = 0; i < config.n_sites; ++i)
    for (int j = i + 1; j < config.n_sites; ++j)
      if (config.excited(i) && config.excited(j)) e += interaction.pair(geometry, i, j);
  return e;
}

}  // namespace ryd
