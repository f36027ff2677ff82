#pragma once

#include <optional>
#include <vector>

#include "ryd/model/interaction.hpp"

namespace ryd {

// Detuning of the |mm> -> |rr> two-photon resonance from the bare resonance.
double two_photon_shift(const Geometry& geometry, const InteractionModel& interaction, int i, int j);

struct CompensatedLadder {
  Geometry geometry;
  double y_scale = 1.0;  // factor applied to the leg spacing ay
};

// Rescales the leg spacing so that the nearest-neighbour interaction across a
// rung equals the one along a leg.
CompensatedLadder compensate_anisotropy(const Geometry& ladder, const InteractionModel& interaction);

// Mean over excited atoms of the interaction each one feels in the given
// configuration (default: the checkerboard).
double mapping_detuning(const Geometry& geometry, const InteractionModel& interaction,
                        std::optional<BasisConfig> config = std::nullopt);

}  // namespace ryd
