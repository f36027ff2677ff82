#pragma once

#include "ryd/core/operator.hpp"
#include "ryd/model/interaction.hpp"

namespace ryd {

// H = sum_i (Omega/2)(e^{i phi}|r><m| + h.c.) - sum_i (Delta + delta_i) n_i
//     + sum_{i<j} V_ij n_i n_j  [ - i (gamma/2) sum_i n_i ]
// The interaction diagonal is computed once; building H(Omega, Delta) is then O(dim).
class RydbergHamiltonian {
 public:
  RydbergHamiltonian(BasisPtr basis, const Geometry& geometry, const InteractionModel& interaction,
                     Eigen::VectorXd site_detuning = {});

  Operator at(double omega, double delta, double phi = 0.0, double gamma = 0.0) const;

  const BasisPtr& basis() const { return basis_; }
  const Eigen::VectorXd& interaction_diagonal() const { return interaction_; }
  const Eigen::VectorXd& excitation_numbers() const { return excitations_; }

 private:
  BasisPtr basis_;
  Eigen::VectorXd interaction_;
  Eigen::VectorXd excitations_;
};

Operator build_hamiltonian(const Geometry& geometry, const InteractionModel& interaction, double omega, double delta,
                           const BasisPtr& basis);

// Diagonal interaction energy of one config.
double interaction_energy(const Geometry& geometry, const InteractionModel& interaction, const BasisConfig& config);

}  // namespace ryd
