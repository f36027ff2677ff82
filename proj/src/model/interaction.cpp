#include "ryd/model/interaction.hpp"

#include <algorithm>
#include <cmath>

namespace ryd {

namespace {
double wrap_pi(double theta) {
  double t = std::fmod(theta, kPi);
  if (t < 0) t += kPi;
  return t;
}
}  // namespace

void InteractionModel::validate() const {
  if (!(c6 > 0.0)) throw InvalidModelError("C6 must be positive");
  for (const auto& p : anisotropy)
    if (p.scale < 0.0) throw InvalidModelError("anisotropy scale must be non-negative");
}

double InteractionModel::scale(double theta_rad) const {
  if (anisotropy.empty()) return 1.0;
  std::vector<AnisotropyPoint> pts = anisotropy;
  for (auto& p : pts) p.theta_rad = wrap_pi(p.theta_rad);
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.theta_rad < b.theta_rad; });
  if (pts.size() == 1) return pts[0].scale;
  const double t = wrap_pi(theta_rad);
  // periodic neighbours around the table
  auto hi = std::upper_bound(pts.begin(), pts.end(), t, [](double v, const auto& p) { return v < p.theta_rad; });
  const AnisotropyPoint a = hi == pts.begin() ? AnisotropyPoint{pts.back().theta_rad - kPi, pts.back().scale} : *(hi - 1);
  const AnisotropyPoint b = hi == pts.end() ? AnisotropyPoint{pts.front().theta_rad + kPi, pts.front().scale} : *hi;
  if (b.theta_rad == a.theta_rad) return a.scale;
  const double w = (t - a.theta_rad) / (b.theta_rad - a.theta_rad);
  return (1 - w) * a.scale + w * b.scale;
}

double InteractionModel::pair(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const {
  const Eigen::Vector2d d = b - a;
  const double r2 = d.squaredNorm();
  if (r2 == 0.0) throw SingularInteractionError("interaction between coincident atoms");
  const double s = anisotropy.empty() ? 1.0 : scale(std::atan2(d.y(), d.x()) - field_angle_rad);
  return s * c6 / (r2 * r2 * r2);
}

Eigen::MatrixXd InteractionModel::matrix(const Geometry& g) const {
  const int n = g.size();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v(i, j) = v(j, i) = pair(g, i, j);
  return v;
}

InteractionModel anisotropic_model(double c6, double field_angle_rad, double perp_scale, int points) {
  InteractionModel m;
  m.c6 = c6;
  m.field_angle_rad = field_angle_rad;
  for (int k = 0; k < points; ++k) {
    const double th = kPi * k / points;
    const double s = std::sin(th);
    m.anisotropy.push_back({th, 1.0 + (perp_scale - 1.0) * s * s});
  }
  return m;
}

}  // namespace ryd
