#pragma once

#include <functional>

#include "ryd/core/types.hpp"

namespace ryd::grape {

struct LbfgsOptions {
  int max_iterations = 200;
  int memory = 10;
  double gradient_tolerance = 1e-9;  // on the max-norm of the gradient
  double cost_tolerance = 1e-12;     // relative decrease between accepted steps
  int max_line_search = 30;
  double armijo = 1e-4;
  double initial_step = 0.1;  // max-norm of the first trial step
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stalled = false;  // line search failed; x is the best point found
};

// fg(x, g) returns f(x) and writes the gradient into g.
using CostGradientFn = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& g)>;
// Called after every accepted step with (iteration, f, x).
using AcceptFn = std::function<void(int, double, const Eigen::VectorXd&)>;

// Limited-memory BFGS with a backtracking Armijo line search.
LbfgsResult minimize_lbfgs(const CostGradientFn& fg, Eigen::VectorXd x0, const LbfgsOptions& opt = {},
                           const AcceptFn& on_accept = {});

}  // namespace ryd::grape
