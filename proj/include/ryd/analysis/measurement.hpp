#pragma once

#include "ryd/core/types.hpp"

namespace ryd::analysis {

// (N0', N1')^T = M (N0, N1)^T with M = [[1 - e00, e10], [e01, 1 - e11]].
// Columns need not sum to one; the deficit is atom loss.
struct MeasurementMatrix {
  double eps00 = 0.0;
  double eps01 = 0.0;
  double eps10 = 0.0;
  double eps11 = 0.0;

  // p_ab: probability of reading b after preparing a
  static MeasurementMatrix from_readout(double p00, double p01, double p10, double p11);

  Eigen::Matrix2d matrix() const;
  MeasurementMatrix without_spin_flips() const { return {eps00, 0.0, 0.0, eps11}; }
  void validate() const;
};

// M^{(x)n}, qubit 0 as the most significant index.
Eigen::MatrixXd measurement_operator(const MeasurementMatrix& m, int n_qubits);

struct CorrectedCounts {
  Eigen::VectorXd counts;
  double residual = 0.0;  // || observed - M counts ||
};

// Non-negative least squares inversion of the readout map.
CorrectedCounts correct_measurement(const Eigen::VectorXd& observed, const MeasurementMatrix& m, int n_qubits,
                                    double max_condition = 1e12);

// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tolerance = 1e-12, int max_iterations = 0);

}  // namespace ryd::analysis
