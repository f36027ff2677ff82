#include "ryd/gate/tog.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "ryd/analysis/fit.hpp"

namespace ryd::gate {

void TogPulse::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidModelError("gate Rabi frequency must be positive");
  if (!(params.area > 0.0) || !std::isfinite(params.area)) throw InvalidModelError("gate duration must be positive");
  if (!(drive_scale >= 0.0)) throw InvalidModelError("drive scale must be non-negative");
  if (slices < 1) throw InvalidModelError("gate needs at least one slice");
  if (!phase_table.empty() && static_cast<int>(phase_table.size()) != slices)
    throw InvalidModelError("phase table length must equal the slice count");
  for (std::size_t j = 1; j < phase_table.size(); ++j)
    if (!std::isfinite(phase_table[j])) throw InvalidModelError("phase table has a non-finite entry");
}

double TogPulse::phase(int j) const {
  if (!phase_table.empty()) return phase_table[j];
  const double t = (j + 0.5) * dt();
  return params.amplitude * std::cos(params.frequency_ratio * omega * t - params.offset);
}

std::vector<SliceControl> TogPulse::controls() const {
  std::vector<SliceControl> out(slices);
  for (int j = 0; j < slices; ++j) {
    out[j].omega = {drive_scale * omega, drive_scale * omega};
    out[j].phase = phase(j);
  }
  return out;
}

GateAmplitudes closed_gate(const TogPulse& pulse, double blockade) {
  pulse.validate();
  const double dt = pulse.dt();
  const double w = pulse.drive_scale * pulse.omega;
  // one atom driven: {m1, r}
  Eigen::Vector2cd one(1.0, 0.0);
  // blockaded pair: {m1m1, W, rr}
  Eigen::Vector3cd two(1.0, 0.0, 0.0);
  const bool finite = std::isfinite(blockade);
  const double c = std::cos(0.5 * w * dt), s = std::sin(0.5 * w * dt);
  for (int j = 0; j < pulse.slices; ++j) {
    const Complex e = std::polar(1.0, pulse.phase(j));
    // exp(-i H dt) for H = (w/2)(e |r><m1| + h.c.)
    const Complex m1 = c * one[0] - kI * s * std::conj(e) * one[1];
    const Complex r = c * one[1] - kI * s * e * one[0];
    one << m1, r;

    Eigen::Matrix3cd h = Eigen::Matrix3cd::Zero();
    const Complex g = std::sqrt(0.5) * w * e;
    h(1, 0) = g;
    h(0, 1) = std::conj(g);
    if (finite) {
      h(2, 1) = g;
      h(1, 2) = std::conj(g);
      h(2, 2) = blockade;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(h);
    Eigen::Vector3cd ph;
    for (int k = 0; k < 3; ++k) ph[k] = std::exp(-kI * es.eigenvalues()[k] * dt);
    two = es.eigenvectors() * ph.asDiagonal() * (es.eigenvectors().adjoint() * two);
  }
  GateAmplitudes a;
  a.single = one[0];
  a.pair = two[0];
  a.residual_single = std::norm(one[1]);
  a.residual_pair = std::norm(two[1]) + std::norm(two[2]);
  return a;
}

double cz_infidelity(const GateAmplitudes& a, double theta) {
  const Complex s = a.single * std::polar(1.0, -theta);
  const Complex p = a.pair * std::polar(1.0, -2.0 * theta);
  const Complex tr = 1.0 + 2.0 * s - p;
  const double f = (std::norm(tr) + 1.0 + 2.0 * std::norm(s) + std::norm(p)) / 20.0;
  return 1.0 - f;
}

double best_compensation(const GateAmplitudes& a) { return std::arg(a.single); }

namespace {

TogPulse with_params(double omega, int slices, const Eigen::VectorXd& x) {
  TogPulse p;
  p.omega = omega;
  p.slices = slices;
  p.params = {x[0], x[1], x[2], x[3]};
  return p;
}

}  // namespace

SynthesisResult synthesize_tog(double omega, double blockade, int slices, const SynthesisOptions& opt) {
  if (!(blockade / omega >= opt.min_blockade_ratio))
    throw InvalidModelError("gate synthesis needs V / Omega >= " + std::to_string(opt.min_blockade_ratio));
  const TogParameters start;
  SynthesisResult best;
  for (double sign : {-1.0, 1.0}) {
    Eigen::VectorXd x(4);
    x << start.amplitude, start.frequency_ratio, sign * std::abs(start.offset), start.area;
    const auto residual = [&](const Eigen::VectorXd& v, Eigen::VectorXd& r) {
      const TogPulse p = with_params(omega, slices, v);
      if (!(p.params.area > 0.0)) {
        r.setConstant(1.0);
        return;
      }
      const GateAmplitudes a = closed_gate(p, blockade);
      const Complex q = a.pair * std::polar(1.0, -2.0 * best_compensation(a));
      r << 1.0 - std::abs(a.single), q.real() + 1.0, q.imag(), 1.0 - std::abs(a.pair);
    };
    analysis::LeastSquaresOptions lo;
    lo.max_evaluations = opt.max_evaluations;
    lo.diff_step = 1e-7;
    const auto fit = analysis::least_squares(residual, {}, x, 4, lo);
    TogPulse p = with_params(omega, slices, fit.x);
    // stay on the time-optimal branch
    if (std::abs(p.params.area / start.area - 1.0) > 0.2) continue;
    const GateAmplitudes a = closed_gate(p, blockade);
    p.compensation = best_compensation(a);
    const double inf = cz_infidelity(a, p.compensation);
    if (inf < best.infidelity) best = {p, inf, a};
  }
  if (!(best.infidelity < opt.tolerance)) throw ConvergenceError("gate synthesis stalled", best.infidelity);
  return best;
}

Matrix16 gate_unitary(const TogPulse& pulse, double blockade) {
  Matrix16 u = Matrix16::Identity();
  const double dt = pulse.dt();
  for (const SliceControl& c : pulse.controls()) {
    Eigen::SelfAdjointEigenSolver<Matrix16> es(gate_hamiltonian(c, blockade));
    Vector16 ph;
    for (int k = 0; k < kDim; ++k) ph[k] = std::exp(-kI * es.eigenvalues()[k] * dt);
    u = (es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint()) * u;
  }
  Vector16 z = Vector16::Ones();
  for (int i = 0; i < kDim; ++i) {
    const int n1 = (level_of(i, 0) == kM1) + (level_of(i, 1) == kM1);
    z[i] = std::polar(1.0, -n1 * pulse.compensation);
  }
  return z.asDiagonal() * u;
}

}  // namespace ryd::gate
