#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "config.hpp"
#include "ryd/analysis/ghz.hpp"
#include "ryd/decay/decay.hpp"
#include "ryd/grape/pulse.hpp"
#include "ryd/model/geometry.hpp"
#include "ryd/model/interaction.hpp"

namespace rydsim {

struct RunContext {
  std::uint64_t seed = 1;
  int threads = 1;
  std::filesystem::path out;

  // Opens out/name for writing with a fixed number format; throws on failure.
  void write(const std::string& name, const std::function<void(std::ostream&)>& body) const;
  void write_json(const std::string& name, const json& value) const;
};

// geometry: {file} | {ladder: {rungs, spacing_um, leg_spacing_um}} | {positions: [[x, y], ...]}
ryd::Geometry load_geometry(Node node);
// interaction: {c6_mhz_um6, field_angle_deg, perpendicular_scale}
ryd::InteractionModel load_interaction(Node node);
// basis: {mode: full|constrained, blockade_radius_um}
ryd::BasisPtr load_basis(Node node, const ryd::Geometry& geometry);
// pulse: {file} or a linear ramp {segments, duration_us, omega_mhz, delta_start_mhz, delta_end_mhz, envelope, ramp_fraction}
ryd::grape::PulseProfile load_pulse(Node node);
// decay: {gamma_per_us, p_det} or {gamma_per_us, branches: {...}}, plus detection_mode
ryd::decay::DecayModel load_decay(Node node);
ryd::decay::DetectionMode load_detection_mode(Node node);


}  // namespace rydsim
