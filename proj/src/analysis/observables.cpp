#include "ryd/analysis/observables.hpp"

#include <cmath>
#include <set>

namespace ryd::analysis {

std::vector<Eigen::Vector2i> lattice_coordinates(const Geometry& geometry) {
  std::vector<Eigen::Vector2i> out;
  if (geometry.ladder) {
    for (int s = 0; s < geometry.size(); ++s) out.emplace_back(s / 2, s % 2);
    return out;
  }
  double unit = 0.0;
  for (int i = 0; i < geometry.size(); ++i)
    for (int j = i + 1; j < geometry.size(); ++j)
      unit = unit == 0.0 ? geometry.distance(i, j) : std::min(unit, geometry.distance(i, j));
  if (unit == 0.0) unit = 1.0;
  for (const auto& p : geometry.positions)
    out.emplace_back(static_cast<int>(std::lround(p.x() / unit)), static_cast<int>(std::lround(p.y() / unit)));
  return out;
}

std::vector<std::pair<int, int>> displacement_pairs(const Geometry& geometry, int dx, int dy) {
  const auto c = lattice_coordinates(geometry);
  const Eigen::Vector2i d(dx, dy);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < geometry.size(); ++i)
    for (int j = 0; j < geometry.size(); ++j)
      if (i != j && c[i] - c[j] == d) pairs.emplace_back(i, j);
  if (pairs.empty()) {
    throw Error("no atom pairs with displacement (" + std::to_string(dx) + "," + std::to_string(dy) + ")");
  }
  return pairs;
}

double g2(const StateVector& state, const Geometry& geometry, int dx, int dy) {
  const auto pairs = displacement_pairs(geometry, dx, dy);
  const Basis& b = *state.basis;
  const double norm2 = state.norm_squared();
  if (norm2 == 0.0) throw DegenerateStateError("g2 of a zero-norm state");
  const int n = b.n_sites();
  std::vector<double> ni(n, 0.0);
  Eigen::MatrixXd nn = Eigen::MatrixXd::Zero(n, n);
  for (Index k = 0; k < b.dim(); ++k) {
    const double p = std::norm(state.amplitudes[k]) / norm2;
    if (p == 0.0) continue;
    for (int i = 0; i < n; ++i) {
      if (!b.excited(k, i)) continue;
      ni[i] += p;
      for (int j = 0; j < n; ++j)
        if (b.excited(k, j)) nn(i, j) += p;
    }
  }
  double sum = 0.0;
  for (auto [i, j] : pairs) sum += nn(i, j) - ni[i] * ni[j];
  return sum / static_cast<double>(pairs.size());
}

double g2(const ShotEnsemble& shots, const Geometry& geometry, int dx, int dy) {
  const auto pairs = displacement_pairs(geometry, dx, dy);
  double sum = 0.0;
  for (auto [i, j] : pairs) {
    double count = 0, si = 0, sj = 0, sij = 0;
    for (const auto& s : shots) {
      if (s.sites[i] == Outcome::kLost || s.sites[j] == Outcome::kLost) continue;
      const double a = s.sites[i] == Outcome::kOne, c = s.sites[j] == Outcome::kOne;
      count += 1;
      si += a;
      sj += c;
      sij += a * c;
    }
    if (count == 0) throw Error("every shot lost one atom of a displacement pair");
    sum += sij / count - (si / count) * (sj / count);
  }
  return sum / static_cast<double>(pairs.size());
}

namespace {

std::set<std::pair<int, int>> table_displacements(const Geometry& geometry) {
  const auto c = lattice_coordinates(geometry);
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < geometry.size(); ++i)
    for (int j = 0; j < geometry.size(); ++j) {
      if (i == j) continue;
      const Eigen::Vector2i d = c[i] - c[j];
      if (d.x() > 0 || (d.x() == 0 && d.y() > 0)) seen.insert({d.x(), d.y()});
    }
  return seen;
}

}  // namespace

std::vector<G2Entry> g2_table(const StateVector& state, const Geometry& geometry) {
  std::vector<G2Entry> out;
  for (auto [dx, dy] : table_displacements(geometry)) out.push_back({dx, dy, g2(state, geometry, dx, dy)});
  return out;
}

std::vector<G2Entry> g2_table(const ShotEnsemble& shots, const Geometry& geometry) {
  std::vector<G2Entry> out;
  for (auto [dx, dy] : table_displacements(geometry)) out.push_back({dx, dy, g2(shots, geometry, dx, dy)});
  return out;
}

int staggered_magnetism(const BasisConfig& config, const Geometry& geometry) {
  int m = 0;
  for (std::size_t c = 0; c < geometry.circular.size(); ++c) {
    const int sign = c % 2 == 0 ? 1 : -1;
    m += sign * sigma_z(config.excited(geometry.circular[c]));
  }
  return m;
}

std::optional<int> staggered_magnetism(const ShotRecord& shot, const Geometry& geometry) {
  if (shot.has_loss()) return std::nullopt;
  int m = 0;
  for (std::size_t c = 0; c < geometry.circular.size(); ++c) {
    const int sign = c % 2 == 0 ? 1 : -1;
    m += sign * sigma_z(shot.sites[geometry.circular[c]]);
  }
  return m;
}

MagnetismSummary staggered_magnetism(const StateVector& state, const Geometry& geometry) {
  const double norm2 = state.norm_squared();
  if (norm2 == 0.0) throw DegenerateStateError("magnetism of a zero-norm state");
  const int n = geometry.size();
  MagnetismSummary out;
  for (Index k = 0; k < state.dim(); ++k) {
    const double p = std::norm(state.amplitudes[k]) / norm2;
    const int m = staggered_magnetism(state.basis->config(k), geometry);
    out.histogram[m] += p;
    out.mean += p * m;
    if (std::abs(m) == n) out.z2_population += p;
  }
  return out;
}

MagnetismSummary staggered_magnetism(const ShotEnsemble& shots, const Geometry& geometry) {
  MagnetismSummary out;
  std::vector<int> values;
  for (const auto& s : shots)
    if (auto m = staggered_magnetism(s, geometry)) values.push_back(*m);
  out.used_shots = static_cast<int>(values.size());
  if (values.empty()) return out;
  const double w = 1.0 / values.size();
  for (int m : values) {
    out.histogram[m] += w;
    out.mean += w * m;
    if (std::abs(m) == geometry.size()) out.z2_population += w;
  }
  return out;
}

GhzFidelity ghz_fidelity_exact(const StateVector& state, const GhzTarget& target) {
  const double norm2 = state.norm_squared();
  if (norm2 == 0.0) throw DegenerateStateError("GHZ fidelity of a zero-norm state");
  const Complex a = state.amplitudes[target.index_a], b = state.amplitudes[target.index_a_bar];
  GhzFidelity f;
  f.population_a = std::norm(a) / norm2;
  f.population_a_bar = std::norm(b) / norm2;
  f.coherence = (a * std::conj(b)).real() / norm2;
  f.fidelity = 0.5 * (f.population_a + f.population_a_bar) + f.coherence;
  return f;
}

GhzFidelity ghz_fidelity_exact(const Eigen::MatrixXcd& rho, const GhzTarget& target) {
  const double tr = rho.trace().real();
  if (tr == 0.0) throw DegenerateStateError("GHZ fidelity of a zero-trace density matrix");
  GhzFidelity f;
  f.population_a = rho(target.index_a, target.index_a).real() / tr;
  f.population_a_bar = rho(target.index_a_bar, target.index_a_bar).real() / tr;
  f.coherence = rho(target.index_a, target.index_a_bar).real() / tr;
  f.fidelity = 0.5 * (f.population_a + f.population_a_bar) + f.coherence;
  return f;
}

}  // namespace ryd::analysis
