#include "ryd/analysis/measurement.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace ryd::analysis {

MeasurementMatrix MeasurementMatrix::from_readout(double p00, double p01, double p10, double p11) {
  MeasurementMatrix m{1.0 - p00, p01, p10, 1.0 - p11};
  m.validate();
  return m;
}

Eigen::Matrix2d MeasurementMatrix::matrix() const {
  Eigen::Matrix2d m;
  m << 1.0 - eps00, eps10, eps01, 1.0 - eps11;
  return m;
}

void MeasurementMatrix::validate() const {
  for (double e : {eps00, eps01, eps10, eps11})
    if (!(e >= 0.0 && e <= 1.0)) throw InvalidModelError("measurement matrix entries must lie in [0, 1]");
}

Eigen::MatrixXd measurement_operator(const MeasurementMatrix& m, int n_qubits) {
  if (n_qubits < 1) throw Error("measurement correction needs at least one qubit");
  m.validate();
  Eigen::MatrixXd op = m.matrix();
  for (int q = 1; q < n_qubits; ++q) op = Eigen::kroneckerProduct(op, m.matrix()).eval();
  return op;
}

CorrectedCounts correct_measurement(const Eigen::VectorXd& observed, const MeasurementMatrix& m, int n_qubits,
                                    double max_condition) {
  const Eigen::MatrixXd op = measurement_operator(m, n_qubits);
  if (observed.size() != op.rows()) throw Error("observed counts do not match 2^n outcomes");
  if ((observed.array() < 0.0).any()) throw Error("observed counts must be non-negative");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(op);
  const auto& s = svd.singularValues();
  const double cond = s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(cond <= max_condition)) throw InvalidModelError("measurement matrix is too ill-conditioned to invert");
  CorrectedCounts out;
  out.counts = nnls(op, observed);
  out.residual = (observed - op * out.counts).norm();
  return out;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tolerance, int max_iterations) {
  const Index n = a.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(30 * n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  const double tol = tolerance * std::max(1.0, a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff());

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Index> idx;
    for (Index j = 0; j < n; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd ap(a.rows(), idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) ap.col(k) = a.col(idx[k]);
    const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);
    z.setZero(n);
    for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[k];
  };

  for (int outer = 0; outer < max_iterations; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    Index best = -1;
    for (Index j = 0; j < n; ++j)
      if (!passive[j] && w[j] > tol && (best < 0 || w[j] > w[best])) best = j;
    if (best < 0) return x;
    passive[best] = true;

    Eigen::VectorXd z;
    for (int inner = 0; inner < max_iterations; ++inner) {
      solve_passive(z);
      bool feasible = true;
      for (Index j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0) feasible = false;
      if (feasible) break;
      // step back to the boundary and drop the variables that hit zero
      double alpha = 1.0;
      for (Index j = 0; j < n; ++j)
        if (passive[j] && z[j] <= 0.0) alpha = std::min(alpha, x[j] / (x[j] - z[j]));
      x += alpha * (z - x);
      for (Index j = 0; j < n; ++j)
        if (passive[j] && x[j] <= tol) {
          passive[j] = false;
          x[j] = 0.0;
        }
    }
    x = z;
  }
  throw ConvergenceError("NNLS did not converge", (b - a * x).norm());
}

}  // namespace ryd::analysis
