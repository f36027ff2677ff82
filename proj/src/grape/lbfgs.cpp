#include "ryd/grape/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace ryd::grape {

LbfgsResult minimize_lbfgs(const CostGradientFn& fg, Eigen::VectorXd x0, const LbfgsOptions& opt, const AcceptFn& on_accept) {
  LbfgsResult out;
  const Index n = x0.size();
  Eigen::VectorXd g(n), g_new(n), x_new(n);
  double f = fg(x0, g);
  out.x = x0;
  out.f = f;
  if (!std::isfinite(f)) throw Error("cost is not finite at the initial point");

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    if (g.cwiseAbs().maxCoeff() <= opt.gradient_tolerance) {
      out.converged = true;
      break;
    }

    // two-loop recursion
    Eigen::VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    Eigen::VectorXd d = -gamma * q;
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(d);
      d += s_hist[k] * (-alpha[k] - beta);
    }
    if (s_hist.empty()) d *= opt.initial_step / std::max(d.cwiseAbs().maxCoeff(), 1e-300);
    double slope = g.dot(d);
    if (slope >= 0.0) {
      // lost descent: restart from a scaled steepest-descent step
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      d = -g * (opt.initial_step / std::max(g.cwiseAbs().maxCoeff(), 1e-300));
      slope = g.dot(d);
    }

    double step = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < opt.max_line_search; ++ls) {
      x_new = out.x + step * d;
      f_new = fg(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + opt.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!s_hist.empty()) {
        s_hist.clear();
        y_hist.clear();
        rho_hist.clear();
        continue;
      }
      out.stalled = true;
      break;
    }

    const Eigen::VectorXd s = x_new - out.x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double decrease = f - f_new;
    out.x = x_new;
    g = g_new;
    f = f_new;
    out.f = f;
    out.iterations = iter + 1;
    if (on_accept) on_accept(out.iterations, f, out.x);
    if (decrease <= opt.cost_tolerance * std::max(std::abs(f), 1e-300)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace ryd::grape
