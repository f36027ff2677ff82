#include "ryd/core/state.hpp"

#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "ryd/core/random.hpp"

namespace ryd {

StateVector StateVector::ground(BasisPtr b) { return from_config(std::move(b), 0); }

StateVector StateVector::from_config(BasisPtr b, std::uint64_t bits) {
  StateVector s(std::move(b));
  const Index k = s.basis->index(bits);
  if (k < 0) throw Error("config is not part of the basis");
  s.amplitudes[k] = 1.0;
  return s;
}

StateVector& StateVector::normalize() {
  const double n = amplitudes.norm();
  if (n == 0.0) throw DegenerateStateError("cannot normalize a zero-norm state");
  amplitudes /= n;
  return *this;
}

Complex StateVector::amplitude(std::uint64_t bits) const {
  const Index k = basis->index(bits);
  return k < 0 ? Complex{} : amplitudes[k];
}

StateVector haar_random_qubit_state(int n_qubits, std::uint64_t seed) {
  if (n_qubits != 1 && n_qubits != 2) throw Error("Haar states are supported for 1 or 2 qubits");
  Rng rng(seed);
  std::normal_distribution<double> gauss;
  StateVector s(full_basis(n_qubits));
  for (Index k = 0; k < s.dim(); ++k) s.amplitudes[k] = {gauss(rng), gauss(rng)};
  return s.normalize();
}

void write_state(std::ostream& os, const StateVector& state) {
  const Basis& b = *state.basis;
  os << "N=" << b.n_sites() << " mode=" << b.mode_name() << " dim=" << b.dim() << '\n';
  os.precision(17);
  for (Index k = 0; k < b.dim(); ++k) {
    os << b.config(k).to_string() << ' ' << state.amplitudes[k].real() << ' ' << state.amplitudes[k].imag() << '\n';
  }
}

StateVector read_state(std::istream& is, const BasisPtr& basis) {
  std::string header;
  if (!std::getline(is, header)) throw Error("state dump is empty");
  std::ostringstream expect;
  expect << "N=" << basis->n_sites() << " mode=" << basis->mode_name() << " dim=" << basis->dim();
  if (header != expect.str()) throw Error("state dump header '" + header + "' does not match basis '" + expect.str() + "'");
  StateVector s(basis);
  std::string bits;
  double re = 0, im = 0;
  Index rows = 0;
  while (is >> bits >> re >> im) {
    const BasisConfig c = BasisConfig::from_string(bits);
    const Index k = c.n_sites == basis->n_sites() ? basis->index(c) : -1;
    if (k < 0) throw Error("state dump contains config " + bits + " outside the basis");
    s.amplitudes[k] = {re, im};
    ++rows;
  }
  if (rows != basis->dim()) throw Error("state dump has " + std::to_string(rows) + " rows, expected " + std::to_string(basis->dim()));
  return s;
}

}  // namespace ryd
