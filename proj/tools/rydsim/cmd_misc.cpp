#include <cmath>

#include "commands.hpp"
#include "ryd/analysis/measurement.hpp"
#include "ryd/analysis/observables.hpp"
#include "ryd/analysis/parity.hpp"
#include "ryd/analysis/shots.hpp"
#include "ryd/core/random.hpp"
#include "ryd/mpp/mpp.hpp"

namespace rydsim {

using namespace ryd;

namespace {

// inf does not survive a JSON round trip
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

Runner parse_decay(Node root, const RunContext& ctx) {
  Node dn = root.child("decay");
  const decay::DecayModel dm = load_decay(dn);
  const decay::DetectionMode mode = load_detection_mode(dn);
  const auto p0s = root.get<std::vector<double>>("p0_grid", {0.25, 0.5, 0.75, 1.0});
  for (double p : p0s)
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p0_grid", "values must lie in [0, 1]");
  if (p0s.empty()) throw ConfigError("p0_grid", "empty grid");
  Node tn = root.child("times");
  const double step = tn.get("step_us", 10.0);
  const int points = tn.get("points", 40);
  if (!(step > 0.0) || points < 2) throw ConfigError(tn.path(), "need a positive step and at least two points");
  const int fit_points = root.get("fit_points", 0);
  const int trajectories = root.get("trajectories", 0);
  if (trajectories < 0) throw ConfigError("trajectories", "must be non-negative");

  return [=] {
    std::vector<double> t;
    for (int i = 0; i <= points; ++i) t.push_back(step * i);
    std::vector<decay::DecayFit> fits, traj_fits;
    std::vector<decay::DecayCurve> curves, traj_curves;
    for (std::size_t i = 0; i < p0s.size(); ++i) {
      curves.push_back(decay::postselected_decay_curve(p0s[i], dm, t, mode));
      if (trajectories > 0) {
        traj_curves.push_back(
            decay::trajectory_decay_curve(p0s[i], dm, t, trajectories, derive_seed(ctx.seed, i), ctx.threads, mode));
        traj_fits.push_back(decay::fit_decay_curve(traj_curves.back(), {}, fit_points));
        // the curves are not exactly exponential, so tau depends on window and
        // weights; fit the exact curve the same way to make the two comparable
        fits.push_back(decay::fit_decay_curve(curves.back(), traj_curves.back().rydberg_err, traj_fits.back().points_used));
      } else {
        fits.push_back(decay::fit_decay_curve(curves.back(), {}, fit_points));
      }
    }
    ctx.write("decay_fits.csv", [&](std::ostream& os) { decay::write_decay_fits_csv(os, fits); });
    if (trajectories > 0)
      ctx.write("decay_fits_trajectory.csv", [&](std::ostream& os) { decay::write_decay_fits_csv(os, traj_fits); });

    ctx.write("curves.csv", [&](std::ostream& os) {
      os << "source,P0,t_us,rydberg,rydberg_err,acceptance\n";
      auto dump = [&](const char* source, const std::vector<decay::DecayCurve>& cs) {
        for (const auto& c : cs)
          for (std::size_t k = 0; k < c.times_us.size(); ++k)
            os << source << ',' << c.p0 << ',' << c.times_us[k] << ',' << c.rydberg[k] << ',' << c.rydberg_err[k]
               << ',' << c.acceptance[k] << '\n';
      };
      dump("postselected", curves);
      dump("trajectory", traj_curves);
    });

    json s;
    s["gamma_per_us"] = dm.gamma_per_us;
    s["detection_fidelity"] = dm.detection_fidelity(mode);
    json rows = json::array();
    for (const auto& f : fits) {
      json r{{"P0", f.p0}, {"tau_us", finite_or_null(f.fit.tau)}, {"tau_err", finite_or_null(f.fit.tau_err)},
             {"points_used", f.points_used}};
      if (f.p0 == 1.0 && f.fit.finite) {
        const auto back = decay::implied_detection_fidelity(f.fit.tau, f.fit.tau_err, dm.gamma_per_us, t, f.points_used);
        s["implied_p_det"] = back.p_det;
        s["implied_p_det_err"] = back.p_det_err;
      }
      rows.push_back(r);
    }
    s["fits"] = rows;
    ctx.write_json("summary.json", s);
  };
}

Runner parse_mpp(Node root, const RunContext& ctx) {
  Node tn = root.child("traps");
  mpp::TrapPair base;
  base.omega_g = tn.frequency("omega_g", base.omega_g);
  base.omega_m = tn.frequency("omega_m", base.omega_g);
  base.k = tn.get("k_per_um", base.k);
  base.n_levels = tn.get("n_levels", base.n_levels);
  base.omega_rabi = tn.frequency("omega_rabi", base.omega_rabi);
  base.hbar_over_mass = tn.get("hbar_over_mass_um2_per_us", base.hbar_over_mass);
  try {
    base.validate();
  } catch (const Error& e) {
    throw ConfigError(tn.path(), e.what());
  }

  Node pn = root.child("pulse");
  mpp::MppPulse pulse;
  pulse.shape = pn.choice("shape", "sin2", {"sin2", "square"}) == "sin2" ? mpp::PulseShape::kSinSquared
                                                                       : mpp::PulseShape::kSquare;
  pulse.area = kPi * pn.get("area_pi", 1.0);
  pulse.steps = pn.get("steps", pulse.steps);
  pulse.calibrate_carrier = pn.get("calibrate_carrier", pulse.calibrate_carrier);
  pulse.initial_level = pn.get("initial_level", pulse.initial_level);
  try {
    pulse.validate();
  } catch (const Error& e) {
    throw ConfigError(pn.path(), e.what());
  }

  Node gn = root.child("grid");
  std::vector<std::pair<double, double>> pairs;
  std::vector<double> ratios, deltas;
  if (gn.has("pairs")) {
    if (gn.has("ratios") || gn.has("delta_m_mhz") || gn.has("delta_m_khz"))
      throw ConfigError(gn.path_of("pairs"), "give either pairs or ratios with delta_m");
    for (const auto& p : gn.require<std::vector<std::vector<double>>>("pairs")) {
      if (p.size() != 2) throw ConfigError(gn.path_of("pairs"), "each pair is [omega_ratio, delta_m_khz]");
      pairs.emplace_back(p[0], kTwoPi * 1e-3 * p[1]);
    }
    if (pairs.empty()) throw ConfigError(gn.path_of("pairs"), "empty grid");
  } else {
    ratios = gn.get("ratios", mpp::default_ratio_grid());
    deltas = gn.frequencies("delta_m", mpp::default_delta_grid());
    if (ratios.empty() || deltas.empty()) throw ConfigError(gn.path(), "empty grid");
    for (double r : ratios)
      if (!(r > 0.0)) throw ConfigError(gn.path_of("ratios"), "ratios must be positive");
  }

  return [=] {
    const auto points = pairs.empty() ? mpp::sweep_inhomogeneity(base, ratios, deltas, pulse, ctx.threads)
                                      : mpp::sweep_pairs(base, pairs, pulse, ctx.threads);
    ctx.write("sweep.csv", [&](std::ostream& os) { mpp::write_sweep_csv(os, points); });
    json s;
    s["lamb_dicke"] = base.lamb_dicke();
    s["points"] = points.size();
    bool truncated = false;
    double worst_unitarity = 0.0;
    const mpp::SweepPoint* best = &points.front();
    for (const auto& p : points) {
      truncated = truncated || p.result.truncated;
      worst_unitarity = std::max(worst_unitarity, p.result.unitarity_error);
      if (p.result.infidelity < best->result.infidelity) best = &p;
    }
    s["truncated"] = truncated;
    s["max_unitarity_error"] = worst_unitarity;
    s["duration_us"] = points.front().result.duration_us;
    s["best"] = {{"omega_ratio", best->omega_ratio},
                 {"delta_m_rad_per_us", best->delta_m},
                 {"infidelity", best->result.infidelity}};
    ctx.write_json("summary.json", s);
  };
}

Runner parse_analyze(Node root, const RunContext& ctx) {
  const Geometry g = load_geometry(root.child("geometry"));
  Node sn = root.child("shots");
  const auto shot_path = sn.file("file");
  analysis::ShotEnsemble shots;
  {
    std::ifstream in(shot_path);
    try {
      shots = analysis::read_shots(in);
    } catch (const Error& e) {
      throw ConfigError(sn.path_of("file"), e.what());
    }
  }
  if (shots.empty()) throw ConfigError(sn.path_of("file"), "no shots");
  for (const auto& s : shots)
    if (s.size() != g.size()) throw ConfigError(sn.path_of("file"), "shot width differs from the geometry");

  const bool correct = root.has("measurement");
  analysis::MeasurementMatrix m;
  if (correct) {
    Node mn = root.child("measurement");
    m = analysis::MeasurementMatrix::from_readout(mn.require<double>("p00"), mn.require<double>("p01"),
                                                  mn.require<double>("p10"), mn.require<double>("p11"));
    try {
      m.validate();
    } catch (const Error& e) {
      throw ConfigError(mn.path(), e.what());
    }
    if (g.size() > 12) throw ConfigError(mn.path(), "measurement correction is limited to 12 atoms");
  }

  return [=] {
    json s;
    s["shots"] = shots.size();
    const auto mag = analysis::staggered_magnetism(shots, g);
    s["used_shots"] = mag.used_shots;
    s["z2_population"] = mag.z2_population;
    s["staggered_magnetism_mean"] = mag.mean;
    s["parity"] = analysis::shot_parity(shots);
    ctx.write("magnetism.csv", [&](std::ostream& os) {
      os << "M,probability\n";
      for (const auto& [mm, p] : mag.histogram) os << mm << ',' << p << '\n';
    });
    ctx.write("g2.csv", [&](std::ostream& os) {
      os << "dx,dy,g2\n";
      for (const auto& e : analysis::g2_table(shots, g)) os << e.dx << ',' << e.dy << ',' << e.value << '\n';
    });

    if (correct) {
      // qubit 0 is the Rydberg level, and qubit 0 of the readout map is site 0
      const int n = g.size();
      const std::uint64_t all = (std::uint64_t{1} << n) - 1;
      Eigen::VectorXd observed = Eigen::VectorXd::Zero(Index{1} << n);
      for (const auto& shot : shots) {
        if (shot.has_loss()) continue;
        std::uint64_t bits = 0;
        for (int i = 0; i < n; ++i)
          if (shot.sites[i] == analysis::Outcome::kOne) bits |= BasisConfig::mask(n, i);
        observed[Index(~bits & all)] += 1.0;
      }
      const BasisConfig a = g.checkerboard();
      const Index ia = Index(~a.bits & all), ib = Index(a.bits);
      auto summary = [&](const analysis::MeasurementMatrix& mm) {
        const auto c = analysis::correct_measurement(observed, mm, n);
        const double total = c.counts.sum();
        return json{{"population_a", c.counts[ia] / total},
                    {"population_a_bar", c.counts[ib] / total},
                    {"z2_population", (c.counts[ia] + c.counts[ib]) / total},
                    {"residual", c.residual}};
      };
      const double used = observed.sum();
      s["measurement"] = {{"observed", {{"population_a", observed[ia] / used},
                                        {"population_a_bar", observed[ib] / used},
                                        {"z2_population", (observed[ia] + observed[ib]) / used}}},
                          {"corrected", summary(m)},
                          {"corrected_without_spin_flips", summary(m.without_spin_flips())}};
    }
    ctx.write_json("analysis.json", s);
  };
}

}  // namespace rydsim
