#include "ryd/core/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace ryd {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix,
// weights mu0 times the squared first eigenvector components.
QuadratureRule golub_welsch(const Eigen::VectorXd& off_diagonal, double mu0) {
  const Index n = off_diagonal.size() + 1;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (Index k = 0; k + 1 < n; ++k) j(k, k + 1) = j(k + 1, k) = off_diagonal[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  QuadratureRule r;
  r.nodes = es.eigenvalues();
  r.weights = mu0 * es.eigenvectors().row(0).transpose().array().square();
  return r;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error("quadrature needs at least one node");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  QuadratureRule r = golub_welsch(off, 2.0);
  const double half = 0.5 * (b - a);
  r.nodes = (r.nodes.array() + 1.0) * half + a;
  r.weights *= half;
  return r;
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw Error("quadrature needs at least one node");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(0.5 * k);
  QuadratureRule r = golub_welsch(off, std::sqrt(kPi));
  // The eigenvector weights lose relative accuracy far out in the tails; the
  // Christoffel form w = exp(-x^2) / sum_j psi_j(x)^2 keeps it.
  const Eigen::VectorXd scaled = hermite_christoffel(r.nodes, n);
  for (int k = 0; k < n; ++k) r.weights[k] = std::exp(-r.nodes[k] * r.nodes[k]) * scaled[k];
  return r;
}

Eigen::VectorXd hermite_christoffel(const Eigen::VectorXd& nodes, int n) {
  Eigen::VectorXd out(nodes.size());
  for (Index k = 0; k < nodes.size(); ++k) {
    const double x = nodes[k];
    // normalized Hermite functions including exp(-x^2/2)
    double prev = 0.0, cur = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x), sum = cur * cur;
    for (int j = 0; j + 1 < n; ++j) {
      const double next = std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(double(j) / (j + 1)) * prev;
      prev = cur;
      cur = next;
      sum += cur * cur;
    }
    out[k] = 1.0 / sum;
  }
  return out;
}

}  // namespace ryd
