#include "ryd/core/propagate.hpp"

#include <tuple>

#include "ryd/core/chebyshev.hpp"

namespace ryd {

namespace {
// beyond this t*r the Bessel tables get long; Krylov substeps instead
constexpr double kChebyshevMaxArgument = 200.0;
}  // namespace

SegmentPropagator::SegmentPropagator(Operator h, const PropagationOptions& opt)
    : h_(std::move(h)), opt_(opt), hermitian_(h_.is_hermitian()), dense_(h_.dim() <= opt.dense_max_dim) {
  if (!dense_) {
    if (hermitian_) std::tie(lo_, hi_) = h_.spectral_interval();
    return;
  }
  matrix_ = h_.dense();
  if (hermitian_ && matrix_.imag().isZero(0.0)) {
    // zero drive phase: the real solver is several times cheaper
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_.real());
    vectors_ = es.eigenvectors().cast<Complex>();
    values_ = es.eigenvalues();
  } else if (hermitian_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_);
    vectors_ = es.eigenvectors();
    values_ = es.eigenvalues();
  }
}

void SegmentPropagator::apply(Eigen::VectorXcd& v, double t, std::span<const double> sample_times,
                              Eigen::VectorXcd* samples) const {
  if (t == 0.0) return;
  if (dense_) {
    const double sign = t > 0 ? 1.0 : -1.0;
    for (std::size_t q = 0; samples != nullptr && q < sample_times.size(); ++q) {
      samples[q] = v;
      apply(samples[q], sign * sample_times[q]);
    }
    if (hermitian_) {
      Eigen::VectorXcd coeff = vectors_.adjoint() * v;
      coeff.array() *= (values_.cast<Complex>() * (-kI * t)).array().exp();
      v.noalias() = vectors_ * coeff;
    } else {
      Eigen::MatrixXcd u = (Complex(0.0, -t) * matrix_).exp();
      v = u * v;
    }
    return;
  }
  if (hermitian_ && std::abs(t) * 0.5 * (hi_ - lo_) <= kChebyshevMaxArgument) {
    chebyshev_expv([this](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { h_.apply(x, y); }, v, t, lo_, hi_,
                   opt_.tolerance, sample_times, samples);
    return;
  }
  KrylovOptions k{opt_.tolerance, opt_.krylov_max_dim, opt_.max_substeps};
  krylov_expv([this](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { h_.apply(x, y); }, v, t, hermitian_, k,
              sample_times, samples);
}

StateVector propagate(const StateVector& state, std::span<const Segment> segments, const PropagationOptions& opt) {
  StateVector out = state;
  for (const Segment& seg : segments) {
    if (seg.hamiltonian.basis()->dim() != state.dim()) throw Error("segment Hamiltonian does not share the state's basis");
    if (seg.duration_us < 0.0) throw Error("segment duration must be non-negative");
    if (seg.duration_us == 0.0) continue;
    SegmentPropagator(seg.hamiltonian, opt).apply(out.amplitudes, seg.duration_us);
    out.time_us += seg.duration_us;
  }
  return out;
}

StateVector propagate(const StateVector& state, const Operator& h, double duration_us, const PropagationOptions& opt) {
  const Segment seg{h, duration_us};
  return propagate(state, std::span<const Segment>(&seg, 1), opt);
}

}  // namespace ryd
