#include "ryd/grape/pulse.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace ryd::grape {

double envelope_value(Envelope envelope, double omega_plateau, double ramp_fraction, double duration_us, double t) {
  if (envelope == Envelope::kFlat) return omega_plateau;
  const double ramp = ramp_fraction * duration_us;
  if (ramp <= 0.0) return omega_plateau;
  const double edge = std::min(t, duration_us - t);
  if (edge >= ramp) return omega_plateau;
  return omega_plateau * 0.5 * (1.0 - std::cos(kPi * std::max(0.0, edge) / ramp));
}

PulseProfile PulseProfile::linear_ramp(int segments, double duration_us, double omega_plateau, double delta_start,
                                       double delta_end, Envelope envelope, double ramp_fraction) {
  if (segments < 2) throw Error("a pulse needs at least two segments");
  PulseProfile p;
  p.omega_plateau = omega_plateau;
  p.envelope = envelope;
  p.ramp_fraction = ramp_fraction;
  p.delta.resize(segments);
  for (int j = 0; j < segments; ++j) p.delta[j] = delta_start + (delta_end - delta_start) * j / (segments - 1.0);
  p.set_duration(duration_us);
  return p;
}

void PulseProfile::set_duration(double t) {
  if (!(t > 0.0)) throw Error("pulse duration must be positive");
  duration_us = t;
  omega.resize(segments());
  for (int j = 0; j < segments(); ++j) omega[j] = envelope_value(envelope, omega_plateau, ramp_fraction, t, midpoint(j));
}

void PulseProfile::validate() const {
  if (segments() < 2) throw Error("a pulse needs at least two segments");
  if (omega.size() != delta.size()) throw Error("omega and delta sample counts differ");
  if (phi.size() != 0 && phi.size() != delta.size()) throw Error("phase sample count differs from the segment count");
  if (!(duration_us > 0.0)) throw Error("pulse duration must be positive");
}

std::vector<double> sweep_profile_report(const PulseProfile& pulse, double threshold) {
  if (pulse.omega.size() == 0 || pulse.omega.maxCoeff() <= 0.0) throw Error("sweep report needs a nonzero drive");
  const double top = pulse.omega.maxCoeff();
  std::vector<double> crossings;
  int prev = -1;
  for (int j = 0; j < pulse.segments(); ++j) {
    if (pulse.omega[j] < top * (1.0 - 1e-9)) {
      prev = -1;
      continue;
    }
    if (prev >= 0) {
      const double a = pulse.delta[prev] / pulse.omega[prev] - threshold;
      const double b = pulse.delta[j] / pulse.omega[j] - threshold;
      if ((a < 0.0 && b >= 0.0) || (a >= 0.0 && b < 0.0)) {
        const double w = a / (a - b);
        crossings.push_back(pulse.midpoint(prev) + w * (pulse.midpoint(j) - pulse.midpoint(prev)));
      }
    }
    prev = j;
  }
  return crossings;
}

void write_pulse_csv(std::ostream& os, const PulseProfile& pulse, const std::map<std::string, std::string>& header) {
  os.precision(17);
  os << "# T_us=" << pulse.duration_us << '\n';
  os << "# N=" << pulse.segments() << '\n';
  os << "# omega_plateau_rad_per_us=" << pulse.omega_plateau << '\n';
  os << "# envelope=" << (pulse.envelope == Envelope::kFlat ? "flat" : "cosine") << '\n';
  os << "# ramp_fraction=" << pulse.ramp_fraction << '\n';
  for (const auto& [k, v] : header) os << "# " << k << '=' << v << '\n';
  os << "t_us,omega_rad_per_us,delta_rad_per_us,phi_rad\n";
  for (int j = 0; j < pulse.segments(); ++j) {
    os << pulse.midpoint(j) << ',' << pulse.omega[j] << ',' << pulse.delta[j] << ',' << pulse.phase(j) << '\n';
  }
}

PulseProfile read_pulse_csv(std::istream& is) {
  PulseProfile p;
  std::map<std::string, std::string> meta;
  std::vector<double> om, de, ph;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (line.rfind("t_us", 0) == 0) continue;
    std::istringstream ls(line);
    double t, o, d, f;
    char c1, c2, c3;
    if (!(ls >> t >> c1 >> o >> c2 >> d >> c3 >> f)) throw Error("malformed pulse row: " + line);
    om.push_back(o);
    de.push_back(d);
    ph.push_back(f);
  }
  if (om.size() < 2) throw Error("pulse file has fewer than two segments");
  auto need = [&](const std::string& k) {
    auto it = meta.find(k);
    if (it == meta.end()) throw Error("pulse file lacks the '" + k + "' header");
    return it->second;
  };
  p.duration_us = std::stod(need("T_us"));
  p.omega_plateau = meta.count("omega_plateau_rad_per_us") ? std::stod(meta["omega_plateau_rad_per_us"]) : 0.0;
  p.envelope = meta.count("envelope") && meta["envelope"] == "flat" ? Envelope::kFlat : Envelope::kCosineTapered;
  if (meta.count("ramp_fraction")) p.ramp_fraction = std::stod(meta["ramp_fraction"]);
  p.omega = Eigen::Map<Eigen::VectorXd>(om.data(), om.size());
  p.delta = Eigen::Map<Eigen::VectorXd>(de.data(), de.size());
  if (p.omega_plateau == 0.0) p.omega_plateau = p.omega.maxCoeff();
  bool any_phase = false;
  for (double v : ph) any_phase = any_phase || v != 0.0;
  if (any_phase) p.phi = Eigen::Map<Eigen::VectorXd>(ph.data(), ph.size());
  p.validate();
  return p;
}

std::vector<Segment> pulse_segments(const PulseProfile& pulse, const RydbergHamiltonian& ham, double gamma) {
  std::vector<Segment> segs;
  segs.reserve(pulse.segments());
  for (int j = 0; j < pulse.segments(); ++j)
    segs.push_back({ham.at(pulse.omega[j], pulse.delta[j], pulse.phase(j), gamma), pulse.dt()});
  return segs;
}

}  // namespace ryd::grape
