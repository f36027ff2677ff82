#include "ryd/analysis/shots.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "ryd/core/random.hpp"

namespace ryd::analysis {

bool ShotRecord::has_loss() const {
  return std::any_of(sites.begin(), sites.end(), [](Outcome o) { return o == Outcome::kLost; });
}

ShotEnsemble sample_shots(const StateVector& state, int count, std::uint64_t seed, double loss_probability) {
  const double norm2 = state.norm_squared();
  if (norm2 == 0.0) throw DegenerateStateError("cannot sample shots from a zero-norm state");
  const Basis& b = *state.basis;
  std::vector<double> cdf(b.dim());
  double acc = 0.0;
  for (Index k = 0; k < b.dim(); ++k) cdf[k] = (acc += std::norm(state.amplitudes[k]) / norm2);
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ShotEnsemble shots(count);
  for (int s = 0; s < count; ++s) {
    const double r = u(rng) * acc;
    const Index k = std::min<Index>(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin(), b.dim() - 1);
    ShotRecord& shot = shots[s];
    shot.shot_id = static_cast<std::uint64_t>(s);
    shot.sites.resize(b.n_sites());
    for (int i = 0; i < b.n_sites(); ++i) {
      shot.sites[i] = b.excited(k, i) ? Outcome::kOne : Outcome::kZero;
      if (loss_probability > 0.0 && u(rng) < loss_probability) shot.sites[i] = Outcome::kLost;
    }
  }
  return shots;
}

void write_shots(std::ostream& os, const ShotEnsemble& shots) {
  if (shots.empty()) return;
  const int n = shots.front().size();
  for (int i = 0; i < n; ++i) os << (i ? "," : "") << "site_" << i;
  os << '\n';
  for (const auto& s : shots) {
    for (int i = 0; i < n; ++i) {
      os << (i ? "," : "");
      os << (s.sites[i] == Outcome::kLost ? 'L' : s.sites[i] == Outcome::kOne ? '1' : '0');
    }
    os << '\n';
  }
}

ShotEnsemble read_shots(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("shot file is empty");
  const int n = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  ShotEnsemble shots;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    ShotRecord s;
    s.shot_id = shots.size();
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      if (cell == "0") s.sites.push_back(Outcome::kZero);
      else if (cell == "1") s.sites.push_back(Outcome::kOne);
      else if (cell == "L") s.sites.push_back(Outcome::kLost);
      else throw Error("shot file row " + std::to_string(row) + ": bad value '" + cell + "'");
    }
    if (s.size() != n) throw Error("shot file row " + std::to_string(row) + " has the wrong number of sites");
    shots.push_back(std::move(s));
  }
  return shots;
}

}  // namespace ryd::analysis
