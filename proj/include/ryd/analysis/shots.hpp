#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ryd/core/state.hpp"

namespace ryd::analysis {

// Outcome 1 means the atom was found in |r>, 0 in |m>.
enum class Outcome : std::uint8_t { kZero = 0, kOne = 1, kLost = 2 };

struct ShotRecord {
  std::vector<Outcome> sites;
  std::uint64_t shot_id = 0;
  std::string detection_mode;

  int size() const { return static_cast<int>(sites.size()); }
  bool has_loss() const;
};

using ShotEnsemble = std::vector<ShotRecord>;

// sigma^z = |r><r| - |m><m| per outcome. In the qubit language of the
// experiment the r level is the qubit state 0; this is the only place the
// two labelings meet.
inline int sigma_z(Outcome o) { return o == Outcome::kOne ? 1 : -1; }
inline int sigma_z(bool excited) { return excited ? 1 : -1; }

// Draws configurations from |amplitude|^2 of the (normalized) state; each
// site is independently marked lost with probability loss_probability.
ShotEnsemble sample_shots(const StateVector& state, int count, std::uint64_t seed, double loss_probability = 0.0);

// CSV with header site_0..site_{N-1}; values 0, 1 or L.
void write_shots(std::ostream& os, const ShotEnsemble& shots);
ShotEnsemble read_shots(std::istream& is);

}  // namespace ryd::analysis
