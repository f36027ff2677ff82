#pragma once

#include "ryd/core/types.hpp"

namespace ryd {

struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Gauss-Legendre on [a, b], nodes ascending.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Gauss-Hermite for the weight exp(-x^2) on the real line, nodes ascending.
QuadratureRule gauss_hermite(int n);
// 1 / sum_{j<n} psi_j(x)^2 with psi_j the normalized Hermite functions: the
// Gauss-Hermite weight divided by exp(-x^2) at each node.
Eigen::VectorXd hermite_christoffel(const Eigen::VectorXd& nodes, int n);

}  // namespace ryd
