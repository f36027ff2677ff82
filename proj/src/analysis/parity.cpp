#include "ryd/analysis/parity.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace ryd::analysis {

double ParityScan::offset() const {
  if (parity.empty()) throw Error("empty parity scan");
  return std::accumulate(parity.begin(), parity.end(), 0.0) / static_cast<double>(parity.size());
}

std::vector<double> uniform_phase_grid(int n) {
  if (n < 1) throw Error("phase grid needs at least one point");
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = kTwoPi * k / n;
  return g;
}

namespace {
void require_full_even(const StateVector& state) {
  if (state.basis->mode() != BasisMode::kFull) throw Error("parity evaluation needs a full basis");
  if (state.basis->n_sites() % 2 != 0) throw Error("parity sign convention needs an even number of sites");
}
}  // namespace

double parity(const StateVector& state, double phi) {
  require_full_even(state);
  const Basis& b = *state.basis;
  const int n = b.n_sites();
  const double norm2 = state.norm_squared();
  if (norm2 == 0.0) throw DegenerateStateError("parity of a zero-norm state");
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  Complex sum = 0.0;
  for (Index k = 0; k < b.dim(); ++k) {
    const Index kbar = static_cast<Index>(b.bits(k) ^ all);
    const int nk = b.excitations(k);
    const double sign = ((nk + n / 2) % 2 == 0) ? 1.0 : -1.0;
    const Complex rho = state.amplitudes[k] * std::conj(state.amplitudes[kbar]);
    sum += sign * rho * std::exp(Complex(0.0, -phi * (2 * nk - n)));
  }
  return sum.real() / norm2;
}

ParityScan parity_scan(const StateVector& state, const std::vector<double>& phi) {
  ParityScan scan{phi, {}};
  for (double p : phi) scan.parity.push_back(parity(state, p));
  return scan;
}

double shot_parity(const ShotEnsemble& shots) {
  double sum = 0.0;
  int used = 0;
  for (const auto& s : shots) {
    if (s.has_loss()) continue;
    int ones = 0;
    for (Outcome o : s.sites) ones += o == Outcome::kOne;
    sum += ones % 2 == 0 ? 1.0 : -1.0;
    ++used;
  }
  if (used == 0) throw Error("no loss-free shots for the parity");
  return sum / used;
}

std::vector<BasisConfig> offset_partner_set(const GhzTarget& target) {
  const int n = target.a.n_sites;
  if (n % 2 != 0) throw Error("parity offset partner set needs an even number of sites");
  std::vector<BasisConfig> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const BasisConfig c{bits, n};
    if (c.excitation_count() != n / 2 || c == target.a || c == target.a_bar) continue;
    out.push_back(c);
  }
  return out;
}

std::map<std::uint64_t, double> populations(const StateVector& state) {
  const double norm2 = state.norm_squared();
  if (norm2 == 0.0) throw DegenerateStateError("populations of a zero-norm state");
  std::map<std::uint64_t, double> out;
  for (Index k = 0; k < state.dim(); ++k) out[state.basis->bits(k)] = std::norm(state.amplitudes[k]) / norm2;
  return out;
}

std::map<std::uint64_t, double> populations(const ShotEnsemble& shots) {
  std::map<std::uint64_t, double> out;
  int used = 0;
  for (const auto& s : shots) {
    if (s.has_loss()) continue;
    BasisConfig c{0, s.size()};
    for (int i = 0; i < s.size(); ++i)
      if (s.sites[i] == Outcome::kOne) c.bits |= BasisConfig::mask(s.size(), i);
    out[c.bits] += 1.0;
    ++used;
  }
  for (auto& [k, v] : out) v /= used;
  return out;
}

double coherence_lower_bound(const ParityScan& scan, const std::map<std::uint64_t, double>& pops, const GhzTarget& target) {
  double penalty = 0.0;
  std::vector<std::string> missing;
  for (const BasisConfig& m : offset_partner_set(target)) {
    auto pm = pops.find(m.bits), pbar = pops.find(m.flipped().bits);
    if (pm == pops.end()) {
      missing.push_back(m.to_string());
      continue;
    }
    if (pbar == pops.end()) continue;  // reported when the partner itself is visited
    penalty += std::sqrt(std::max(0.0, pm->second) * std::max(0.0, pbar->second));
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "populations missing for " << missing.size() << " configs:";
    for (std::size_t i = 0; i < missing.size() && i < 8; ++i) msg << ' ' << missing[i];
    if (missing.size() > 8) msg << " ...";
    throw Error(msg.str());
  }
  return scan.offset() - penalty;
}

OscillationAmplitude oscillation_amplitude(const StateVector& state, int delta_n) {
  require_full_even(state);
  if (delta_n <= 0 || delta_n % 2 != 0) throw Error("oscillation order must be even and positive");
  const Basis& b = *state.basis;
  const int n = b.n_sites();
  const double norm2 = state.norm_squared();
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  OscillationAmplitude out;
  for (Index k = 0; k < b.dim(); ++k) {
    if (std::abs(2 * b.excitations(k) - n) != delta_n) continue;
    const Index kbar = static_cast<Index>(b.bits(k) ^ all);
    out.exact += std::abs(state.amplitudes[k] * std::conj(state.amplitudes[kbar])) / norm2;
    out.bound += std::sqrt(std::norm(state.amplitudes[k]) * std::norm(state.amplitudes[kbar])) / norm2;
  }
  return out;
}

}  // namespace ryd::analysis
