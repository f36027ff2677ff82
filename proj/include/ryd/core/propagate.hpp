#pragma once

#include <span>

#include "ryd/core/krylov.hpp"
#include "ryd/core/operator.hpp"

namespace ryd {

struct PropagationOptions {
  double tolerance = 1e-10;
  Index dense_max_dim = 64;
  int krylov_max_dim = 40;
  int max_substeps = 100000;
};

// exp(-i t H) for one time-independent H. Small bases are diagonalized once
// and reused for every t. Larger Hermitian ones use a Chebyshev expansion for
// short times and Krylov otherwise; non-Hermitian ones always use Krylov.
class SegmentPropagator {
 public:
  explicit SegmentPropagator(Operator h, const PropagationOptions& opt = {});

  // v <- exp(-i t H) v; negative t is allowed. With sample_times (ascending
  // magnitudes in (0, |t|]) the intermediate states are written to samples.
  void apply(Eigen::VectorXcd& v, double t, std::span<const double> sample_times = {},
             Eigen::VectorXcd* samples = nullptr) const;
  const Operator& hamiltonian() const { return h_; }

 private:
  Operator h_;
  PropagationOptions opt_;
  bool hermitian_;
  bool dense_;
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd values_;
  Eigen::MatrixXcd matrix_;
  double lo_ = 0.0, hi_ = 0.0;  // Gershgorin interval for the Chebyshev path
};

struct Segment {
  Operator hamiltonian;
  double duration_us;
};

StateVector propagate(const StateVector& state, std::span<const Segment> segments, const PropagationOptions& opt = {});
StateVector propagate(const StateVector& state, const Operator& h, double duration_us, const PropagationOptions& opt = {});

}  // namespace ryd
