#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "ryd/core/types.hpp"
#include "ryd/decay/decay.hpp"

namespace ryd::gate {

// Per-atom levels. The drive couples m1 and r0 only; |decay> is a sink.
enum Level : int { kM0 = 0, kM1 = 1, kR0 = 2, kDecayed = 3 };
inline constexpr int kLevels = 4;
inline constexpr int kDim = kLevels * kLevels;

// Atom A is the slow index.
constexpr int pair_index(int a, int b) { return a * kLevels + b; }
constexpr int level_of(int index, int atom) { return atom == 0 ? index / kLevels : index % kLevels; }

using Matrix16 = Eigen::Matrix<Complex, kDim, kDim>;
using Vector16 = Eigen::Matrix<Complex, kDim, 1>;
using Matrix4 = Eigen::Matrix<Complex, 4, 4>;
using Vector4 = Eigen::Matrix<Complex, 4, 1>;

// The four m-qubit basis states, in the order |m0m0>, |m0m1>, |m1m0>, |m1m1>.
inline constexpr std::array<int, 4> kQubitIndices{pair_index(kM0, kM0), pair_index(kM0, kM1), pair_index(kM1, kM0),
                                                  pair_index(kM1, kM1)};

struct DensityMatrix4L {
  Matrix16 rho = Matrix16::Zero();
  double time_us = 0.0;

  static DensityMatrix4L pure(const Vector16& psi);
  double trace() const { return rho.trace().real(); }
  // Throws InvalidModelError if the matrix is not Hermitian, unit trace and
  // positive semidefinite within the given tolerances.
  void validate(double tolerance = 1e-10, double positivity = 1e-8) const;
};

// Rates of the three per-atom channels r0 -> {decayed, m0, m1}, in 1/us.
struct DecayRates {
  double to_decayed = 0.0;
  double to_m0 = 0.0;
  double to_m1 = 0.0;

  double total() const { return to_decayed + to_m0 + to_m1; }
  // The m0 and m1 branches stay in the qubit manifold; every other branch
  // leaves the atom in a non-interacting level.
  static DecayRates from_model(const decay::DecayModel& model);
};

// Drive settings for one piecewise-constant slice. Amplitude and detuning are
// per atom so shot-to-shot noise can differ between the two sites.
struct SliceControl {
  std::array<double, 2> omega{0.0, 0.0};  // rad/us
  std::array<double, 2> delta{0.0, 0.0};  // rad/us, on r0
  double phase = 0.0;
};

// Two-atom Hamiltonian. An infinite blockade removes every coupling into |r0 r0>.
Matrix16 gate_hamiltonian(const SliceControl& c, double blockade);

// exp(-i H_eff t) for a fixed non-Hermitian H_eff, from its eigensystem.
class SliceExponential {
 public:
  SliceExponential() = default;
  explicit SliceExponential(const Matrix16& h_eff);
  Matrix16 at(double t) const;

 private:
  Matrix16 vectors_, inverse_;
  Vector16 values_;
};

// One slice of Lindblad evolution. The no-jump part is exact. Jump feeding is
// integrated by Gauss-Legendre quadrature, and fed population is carried to the
// slice end by the Hermitian part alone: a second decay inside the same slice
// is dropped (second order in Gamma dt), which keeps the map linear and the
// trace exact up to quadrature error.
class LindbladSlice {
 public:
  LindbladSlice(const SliceControl& c, double blockade, const DecayRates& rates, double dt, int nodes = 4);

  void apply(Matrix16& rho) const;
  const Matrix16& no_jump() const { return full_; }
  const SliceExponential& exponential() const { return exp_; }
  double dt() const { return dt_; }
  const DecayRates& rates() const { return rates_; }

 private:
  DecayRates rates_;
  double dt_;
  SliceExponential exp_;
  Matrix16 full_;
  std::vector<Matrix16> fwd_, back_;
  std::vector<double> weights_;
};

// Adds sum_k L_k rho L_k^dagger for the six jump operators into out.
void add_jumps(const Matrix16& rho, const DecayRates& rates, Matrix16& out);

// Applies one slice and checks the result; a failed check retries with the
// step halved, up to max_halvings times, then throws ConvergenceError.
DensityMatrix4L master_equation_step(const DensityMatrix4L& rho, const SliceControl& c, double blockade,
                                     const DecayRates& rates, double dt, int max_halvings = 4);

}  // namespace ryd::gate
