#pragma once

#include <cstdint>
#include <iosfwd>

#include "ryd/core/basis.hpp"

namespace ryd {

struct StateVector {
  BasisPtr basis;
  Eigen::VectorXcd amplitudes;
  double time_us = 0.0;

  StateVector() = default;
  explicit StateVector(BasisPtr b) : basis(std::move(b)), amplitudes(Eigen::VectorXcd::Zero(basis->dim())) {}
  StateVector(BasisPtr b, Eigen::VectorXcd amps) : basis(std::move(b)), amplitudes(std::move(amps)) {}

  // |m m ... m>
  static StateVector ground(BasisPtr b);
  static StateVector from_config(BasisPtr b, std::uint64_t bits);

  Index dim() const { return amplitudes.size(); }
  double norm_squared() const { return amplitudes.squaredNorm(); }
  StateVector& normalize();
  StateVector normalized() const { return StateVector(*this).normalize(); }

  Complex amplitude(std::uint64_t bits) const;
  double probability(std::uint64_t bits) const { return std::norm(amplitude(bits)); }
};

// Haar-random pure state on n_qubits (1 or 2) qubits, returned on a full basis
// of n_qubits sites whose two levels stand for the qubit states |0>, |1>.
StateVector haar_random_qubit_state(int n_qubits, std::uint64_t seed);

// "N=<n> mode=<full|constrained> dim=<d>" then one "bits re im" line per config.
void write_state(std::ostream& os, const StateVector& state);
StateVector read_state(std::istream& is, const BasisPtr& basis);

}  // namespace ryd
