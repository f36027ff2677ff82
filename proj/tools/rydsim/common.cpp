#include "common.hpp"

#include <cmath>
#include <iomanip>

#include "ryd/core/basis.hpp"

namespace rydsim {

void RunContext::write(const std::string& name, const std::function<void(std::ostream&)>& body) const {
  const auto path = out / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  os << std::setprecision(12);
  body(os);
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void RunContext::write_json(const std::string& name, const json& value) const {
  write(name, [&](std::ostream& os) { os << value.dump(2) << '\n'; });
}

ryd::Geometry load_geometry(Node node) {
  const int given = int(node.has("file")) + int(node.has("ladder")) + int(node.has("positions"));
  if (given != 1) throw ConfigError(node.path(), "give exactly one of file, ladder, positions");
  ryd::Geometry g;
  if (node.has("file")) {
    const auto path = node.file("file");
    std::ifstream in(path);
    try {
      g = ryd::read_geometry(in);
    } catch (const ryd::Error& e) {
      throw ConfigError(node.path_of("file"), e.what());
    }
  } else if (node.has("ladder")) {
    Node l = node.child("ladder");
    const int rungs = l.require<int>("rungs");
    const double ax = l.get<double>("spacing_um", ryd::kDefaultSpacingUm);
    const double ay = l.get<double>("leg_spacing_um", ax);
    if (rungs < 1) throw ConfigError(l.path_of("rungs"), "must be positive");
    g = ryd::Geometry::make_ladder(rungs, ax, ay);
  } else {
    const auto xy = node.require<std::vector<std::vector<double>>>("positions");
    std::vector<Eigen::Vector2d> pos;
    for (const auto& p : xy) {
      if (p.size() != 2) throw ConfigError(node.path_of("positions"), "each position needs two coordinates");
      pos.emplace_back(p[0], p[1]);
    }
    if (pos.empty()) throw ConfigError(node.path_of("positions"), "no atoms");
    g = ryd::Geometry::from_positions(std::move(pos));
  }
  try {
    g.validate();
  } catch (const ryd::Error& e) {
    throw ConfigError(node.path(), e.what());
  }
  return g;
}

ryd::InteractionModel load_interaction(Node node) {
  const double c6 = ryd::kTwoPi * node.get<double>("c6_mhz_um6", ryd::kDefaultC6 / ryd::kTwoPi);
  const double angle = node.get<double>("field_angle_deg", 0.0) * ryd::kPi / 180.0;
  const double perp = node.get<double>("perpendicular_scale", 1.0);
  ryd::InteractionModel m;
  m.c6 = c6;
  m.field_angle_rad = angle;
  if (perp != 1.0) m = ryd::anisotropic_model(c6, angle, perp);
  try {
    m.validate();
  } catch (const ryd::Error& e) {
    throw ConfigError(node.path(), e.what());
  }
  return m;
}

ryd::BasisPtr load_basis(Node node, const ryd::Geometry& geometry) {
  const std::string mode = node.choice("mode", "full", {"full", "constrained"});
  if (mode == "full") {
    if (node.has("blockade_radius_um"))
      throw ConfigError(node.path_of("blockade_radius_um"), "only used with mode constrained");
    return ryd::full_basis(geometry.size());
  }
  const double radius = node.get<double>("blockade_radius_um", ryd::kDefaultSpacingUm * 1.01);
  if (!(radius > 0.0)) throw ConfigError(node.path_of("blockade_radius_um"), "must be positive");
  const auto edges = geometry.edges_within(radius);
  return ryd::enumerate_basis(geometry.size(), ryd::BasisMode::kConstrained, edges);
}

ryd::grape::PulseProfile load_pulse(Node node) {
  using ryd::grape::PulseProfile;
  if (node.has("file")) {
    const auto path = node.file("file");
    std::ifstream in(path);
    try {
      PulseProfile p = ryd::grape::read_pulse_csv(in);
      p.validate();
      return p;
    } catch (const ryd::Error& e) {
      throw ConfigError(node.path_of("file"), e.what());
    }
  }
  const int segments = node.get<int>("segments", 150);
  const double duration = node.get<double>("duration_us", 1.0);
  const double omega = node.frequency("omega", ryd::mhz(3.0));
  const double d0 = node.frequency("delta_start", ryd::mhz(-8.0));
  const double d1 = node.frequency("delta_end", ryd::mhz(6.0));
  const std::string env = node.choice("envelope", "cosine", {"cosine", "flat"});
  const double ramp = node.get<double>("ramp_fraction", 0.15);
  try {
    PulseProfile p = PulseProfile::linear_ramp(
        segments, duration, omega, d0, d1,
        env == "flat" ? ryd::grape::Envelope::kFlat : ryd::grape::Envelope::kCosineTapered, ramp);
    p.validate();
    return p;
  } catch (const ryd::Error& e) {
    throw ConfigError(node.path(), e.what());
  }
}

ryd::decay::DecayModel load_decay(Node node) {
  using ryd::decay::DecayModel;
  const double gamma = node.get<double>("gamma_per_us", 1.0 / 60.0);
  DecayModel d;
  if (node.has("p_det")) {
    if (node.has("branches")) throw ConfigError(node.path_of("branches"), "give either p_det or branches");
    d = DecayModel::with_detection(gamma, node.get<double>("p_det", 1.0));
  } else {
    d.gamma_per_us = gamma;
    Node b = node.child("branches");
    const char* names[] = {"detected_loss", "m0", "m1", "ground", "other"};
    for (int i = 0; i < ryd::decay::kBranchCount; ++i) d.branches[i] = b.get<double>(names[i], d.branches[i]);
  }
  try {
    d.validate();
  } catch (const ryd::Error& e) {
    throw ConfigError(node.path(), e.what());
  }
  return d;
}

ryd::decay::DetectionMode load_detection_mode(Node node) {
  const std::string m = node.choice("detection_mode", "rydberg_qubit", {"rydberg_qubit", "metastable_and_rydberg"});
  return m == "rydberg_qubit" ? ryd::decay::DetectionMode::kRydbergQubit
                              : ryd::decay::DetectionMode::kMetastableAndRydberg;
}

}  // namespace rydsim
