#include "ryd/model/geometry.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "ryd/core/random.hpp"

namespace ryd {

Geometry Geometry::make_ladder(int rungs, double ax_um, double ay_um) {
  if (rungs < 1) throw InvalidModelError("ladder needs at least one rung");
  if (ax_um <= 0.0 || ay_um <= 0.0) throw InvalidModelError("ladder spacings must be positive");
  Geometry g;
  g.ladder = LadderLattice{rungs, ax_um, ay_um};
  for (int r = 0; r < rungs; ++r)
    for (int leg = 0; leg < 2; ++leg) g.positions.emplace_back(r * ax_um, leg * ay_um);
  for (int r = 0; r < rungs; ++r) g.circular.push_back(2 * r);
  for (int r = rungs - 1; r >= 0; --r) g.circular.push_back(2 * r + 1);
  return g;
}

Geometry Geometry::from_positions(std::vector<Eigen::Vector2d> positions) {
  Geometry g;
  g.positions = std::move(positions);
  for (int i = 0; i < g.size(); ++i) g.circular.push_back(i);
  return g;
}

void Geometry::validate() const {
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j)
      if (distance(i, j) <= 0.0) {
        throw SingularInteractionError("atoms " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
}

int Geometry::staggered_sign(int site) const {
  for (std::size_t c = 0; c < circular.size(); ++c)
    if (circular[c] == site) return c % 2 == 0 ? 1 : -1;
  throw Error("site " + std::to_string(site) + " has no circular index");
}

std::vector<Edge> Geometry::edges_within(double radius_um) const {
  std::vector<Edge> edges;
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j)
      if (distance(i, j) <= radius_um) edges.push_back({i, j});
  return edges;
}

BasisConfig Geometry::checkerboard() const {
  if (static_cast<int>(circular.size()) != size()) throw Error("geometry has no circular index");
  BasisConfig c{0, size()};
  for (std::size_t k = 0; k < circular.size(); k += 2) c.bits |= BasisConfig::mask(size(), circular[k]);
  return c;
}

Geometry sample_disordered_geometry(const Geometry& geometry, const DisorderSampler& sampler) {
  if (sampler.sigma_nm < 0.0) throw InvalidModelError("disorder strength must be non-negative");
  if (sampler.sigma_nm == 0.0) return geometry;
  Geometry out = geometry;
  Rng rng(sampler.seed);
  std::normal_distribution<double> gauss(0.0, sampler.sigma_nm * 1e-3);
  for (auto& p : out.positions) {
    p.x() += gauss(rng);
    p.y() += gauss(rng);
  }
  return out;
}

void write_geometry(std::ostream& os, const Geometry& g) {
  os.precision(17);
  if (g.ladder) os << "ladder rungs=" << g.ladder->rungs << " ax=" << g.ladder->ax_um << " ay=" << g.ladder->ay_um << '\n';
  for (int i = 0; i < g.size(); ++i) os << i << ' ' << g.positions[i].x() << ' ' << g.positions[i].y() << '\n';
}

Geometry read_geometry(std::istream& is) {
  std::string line;
  std::optional<LadderLattice> ladder;
  std::vector<Eigen::Vector2d> pos;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("ladder", 0) == 0) {
      LadderLattice l;
      if (std::sscanf(line.c_str(), "ladder rungs=%d ax=%lf ay=%lf", &l.rungs, &l.ax_um, &l.ay_um) != 3) {
        throw Error("geometry line " + std::to_string(line_no) + ": malformed ladder header");
      }
      ladder = l;
      continue;
    }
    std::istringstream ls(line);
    int idx = 0;
    double x = 0, y = 0;
    if (!(ls >> idx >> x >> y)) throw Error("geometry line " + std::to_string(line_no) + ": expected 'index x_um y_um'");
    if (idx != static_cast<int>(pos.size())) throw Error("geometry line " + std::to_string(line_no) + ": indices must be consecutive from 0");
    pos.emplace_back(x, y);
  }
  if (pos.empty()) throw Error("geometry file has no atoms");
  Geometry g;
  if (ladder) {
    if (static_cast<int>(pos.size()) != 2 * ladder->rungs) throw Error("ladder header does not match the atom count");
    g = Geometry::make_ladder(ladder->rungs, ladder->ax_um, ladder->ay_um);
    g.positions = std::move(pos);
  } else {
    g = Geometry::from_positions(std::move(pos));
  }
  g.validate();
  return g;
}

}  // namespace ryd
