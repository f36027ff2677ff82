#include "ryd/gate/four_level.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "ryd/core/quadrature.hpp"

namespace ryd::gate {

DensityMatrix4L DensityMatrix4L::pure(const Vector16& psi) {
  DensityMatrix4L out;
  out.rho = psi * psi.adjoint();
  return out;
}

void DensityMatrix4L::validate(double tolerance, double positivity) const {
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tolerance) throw InvalidModelError("density matrix is not Hermitian: residual " + std::to_string(herm));
  if (std::abs(trace() - 1.0) > tolerance)
    throw InvalidModelError("density matrix trace is " + std::to_string(trace()));
  const Matrix16 h = 0.5 * (rho + rho.adjoint());
  const double low = Eigen::SelfAdjointEigenSolver<Matrix16>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (low < -positivity) throw InvalidModelError("density matrix has eigenvalue " + std::to_string(low));
}

DecayRates DecayRates::from_model(const decay::DecayModel& model) {
  using decay::Branch;
  model.validate();
  const double g = model.gamma_per_us;
  DecayRates r;
  r.to_m0 = g * model.branch(Branch::kM0);
  r.to_m1 = g * model.branch(Branch::kM1);
  r.to_decayed = g * (model.branch(Branch::kDetectedLoss) + model.branch(Branch::kGround) + model.branch(Branch::kOther));
  return r;
}

Matrix16 gate_hamiltonian(const SliceControl& c, double blockade) {
  Matrix16 h = Matrix16::Zero();
  const Complex e = std::polar(1.0, c.phase);
  for (int other = 0; other < kLevels; ++other) {
    // atom A
    h(pair_index(kR0, other), pair_index(kM1, other)) += 0.5 * c.omega[0] * e;
    h(pair_index(kR0, other), pair_index(kR0, other)) -= c.delta[0];
    // atom B
    h(pair_index(other, kR0), pair_index(other, kM1)) += 0.5 * c.omega[1] * e;
    h(pair_index(other, kR0), pair_index(other, kR0)) -= c.delta[1];
  }
  const int rr = pair_index(kR0, kR0);
  if (std::isinf(blockade)) {
    h.row(rr).setZero();
    h.col(rr).setZero();
  } else {
    h(rr, rr) += blockade;
  }
  // fill the upper half of the drive terms
  for (int i = 0; i < kDim; ++i)
    for (int j = i + 1; j < kDim; ++j)
      if (h(j, i) != Complex(0)) h(i, j) = std::conj(h(j, i));
  return h;
}

SliceExponential::SliceExponential(const Matrix16& h_eff) {
  Eigen::ComplexEigenSolver<Matrix16> es(h_eff);
  vectors_ = es.eigenvectors();
  values_ = es.eigenvalues();
  inverse_ = vectors_.inverse();
}

Matrix16 SliceExponential::at(double t) const {
  Vector16 d;
  for (int k = 0; k < kDim; ++k) d[k] = std::exp(-kI * values_[k] * t);
  return vectors_ * d.asDiagonal() * inverse_;
}

void add_jumps(const Matrix16& rho, const DecayRates& rates, Matrix16& out) {
  const std::array<std::pair<int, double>, 3> channels{
      {{kDecayed, rates.to_decayed}, {kM0, rates.to_m0}, {kM1, rates.to_m1}}};
  for (const auto& [x, g] : channels) {
    if (g == 0.0) continue;
    for (int b = 0; b < kLevels; ++b)
      for (int b2 = 0; b2 < kLevels; ++b2) {
        out(pair_index(x, b), pair_index(x, b2)) += g * rho(pair_index(kR0, b), pair_index(kR0, b2));
        out(pair_index(b, x), pair_index(b2, x)) += g * rho(pair_index(b, kR0), pair_index(b2, kR0));
      }
  }
}

namespace {

Matrix16 effective_hamiltonian(const SliceControl& c, double blockade, const DecayRates& rates) {
  Matrix16 h = gate_hamiltonian(c, blockade);
  const double half = 0.5 * rates.total();
  for (int i = 0; i < kDim; ++i) {
    const int n = (level_of(i, 0) == kR0) + (level_of(i, 1) == kR0);
    h(i, i) -= kI * (half * n);
  }
  return h;
}

}  // namespace

LindbladSlice::LindbladSlice(const SliceControl& c, double blockade, const DecayRates& rates, double dt, int nodes)
    : rates_(rates), dt_(dt), exp_(effective_hamiltonian(c, blockade, rates)) {
  full_ = exp_.at(dt);
  if (rates.total() == 0.0) return;
  const QuadratureRule q = gauss_legendre(nodes, 0.0, dt);
  Eigen::SelfAdjointEigenSolver<Matrix16> herm(gate_hamiltonian(c, blockade));
  for (int k = 0; k < nodes; ++k) {
    fwd_.push_back(exp_.at(q.nodes[k]));
    Vector16 ph;
    for (int i = 0; i < kDim; ++i) ph[i] = std::exp(-kI * herm.eigenvalues()[i] * (dt - q.nodes[k]));
    back_.push_back(herm.eigenvectors() * ph.asDiagonal() * herm.eigenvectors().adjoint());
    weights_.push_back(q.weights[k]);
  }
}

void LindbladSlice::apply(Matrix16& rho) const {
  Matrix16 next = full_ * rho * full_.adjoint();
  if (!fwd_.empty()) {
    Matrix16 deposit = Matrix16::Zero();
    Matrix16 fed;
    for (std::size_t k = 0; k < fwd_.size(); ++k) {
      fed.setZero();
      add_jumps(fwd_[k] * rho * fwd_[k].adjoint(), rates_, fed);
      deposit += weights_[k] * (back_[k] * fed * back_[k].adjoint());
    }
    next += deposit;
  }
  rho = 0.5 * (next + next.adjoint());
}

namespace {

bool step_ok(const Matrix16& before, const Matrix16& after) {
  if (std::abs(after.trace().real() - before.trace().real()) > 1e-10) return false;
  const double low = Eigen::SelfAdjointEigenSolver<Matrix16>(after, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return low >= -1e-8;
}

bool step_recursive(Matrix16& rho, const SliceControl& c, double blockade, const DecayRates& rates, double dt,
                    int halvings_left) {
  Matrix16 trial = rho;
  LindbladSlice(c, blockade, rates, dt).apply(trial);
  if (step_ok(rho, trial)) {
    rho = trial;
    return true;
  }
  if (halvings_left == 0) return false;
  return step_recursive(rho, c, blockade, rates, 0.5 * dt, halvings_left - 1) &&
         step_recursive(rho, c, blockade, rates, 0.5 * dt, halvings_left - 1);
}

}  // namespace

DensityMatrix4L master_equation_step(const DensityMatrix4L& rho, const SliceControl& c, double blockade,
                                     const DecayRates& rates, double dt, int max_halvings) {
  DensityMatrix4L out = rho;
  if (!step_recursive(out.rho, c, blockade, rates, dt, max_halvings))
    throw ConvergenceError("master equation step failed trace/positivity checks", dt);
  out.time_us += dt;
  return out;
}

}  // namespace ryd::gate
