#include <cmath>
#include <map>

#include "commands.hpp"
#include "ryd/analysis/observables.hpp"
#include "ryd/analysis/parity.hpp"
#include "ryd/analysis/shots.hpp"
#include "ryd/core/parallel.hpp"
#include "ryd/core/random.hpp"
#include "ryd/grape/grape.hpp"

namespace rydsim {

using namespace ryd;

namespace {

GhzTarget make_target(const BasisPtr& basis, const Geometry& g, const std::string& path) {
  try {
    return GhzTarget::checkerboard(basis, g);
  } catch (const Error& e) {
    throw ConfigError(path, e.what());
  }
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

double sem(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1) / v.size());
}

}  // namespace

Runner parse_ghz_optimize(Node root, const RunContext& ctx) {
  const Geometry g = load_geometry(root.child("geometry"));
  const InteractionModel im = load_interaction(root.child("interaction"));
  const BasisPtr basis = load_basis(root.child("basis"), g);
  const GhzTarget target = make_target(basis, g, "basis");
  const grape::PulseProfile initial = load_pulse(root.child("pulse"));

  Node gn = root.child("grape");
  grape::GrapeConfig c;
  c.samples = gn.get("samples", c.samples);
  c.disorder_nm = gn.get("disorder_nm", c.disorder_nm);
  c.eta = gn.get("eta", c.eta);
  c.dT_us = gn.get("dT_us", c.dT_us);
  c.t_final_us = gn.get("t_final_us", c.t_final_us);
  c.max_iterations = gn.get("max_iterations", c.max_iterations);
  c.cost_tolerance = gn.get("cost_tolerance", c.cost_tolerance);
  c.gradient_tolerance = gn.get("gradient_tolerance", c.gradient_tolerance);
  c.lbfgs_memory = gn.get("lbfgs_memory", c.lbfgs_memory);
  c.quadrature_nodes = gn.get("quadrature_nodes", c.quadrature_nodes);
  c.seed = ctx.seed;
  c.threads = ctx.threads;
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(gn.path(), e.what());
  }

  return [=] {
    const auto r = grape::optimize_pulse(initial, g, im, target, c);
    ctx.write("pulse.csv", [&](std::ostream& os) {
      write_pulse_csv(os, r.pulse,
                      {{"seed", std::to_string(c.seed)},
                       {"disorder_nm", std::to_string(c.disorder_nm)},
                       {"samples", std::to_string(c.samples)}});
    });
    ctx.write("trace.csv", [&](std::ostream& os) { grape::write_trace_csv(os, r.trace); });
    json s;
    s["cost"] = r.final_cost.cost;
    s["fidelity_mean"] = r.final_cost.fidelity_mean;
    s["penalty"] = r.final_cost.penalty;
    s["duration_us"] = r.pulse.duration_us;
    s["stages"] = r.stages;
    s["stalled"] = r.stalled;
    s["iterations"] = r.trace.empty() ? 0 : r.trace.back().iteration;
    s["crossings_us"] = grape::sweep_profile_report(r.pulse);
    ctx.write_json("summary.json", s);
  };
}

Runner parse_ghz_evolve(Node root, const RunContext& ctx) {
  const Geometry g = load_geometry(root.child("geometry"));
  const InteractionModel im = load_interaction(root.child("interaction"));
  const BasisPtr basis = load_basis(root.child("basis"), g);
  const GhzTarget target = make_target(basis, g, "basis");
  const bool perfect = root.choice("mode", "pulse", {"pulse", "perfect_ghz"}) == "perfect_ghz";
  grape::PulseProfile pulse;
  if (!perfect) pulse = load_pulse(root.child("pulse"));

  Node dn = root.child("disorder");
  const double sigma_nm = dn.get("sigma_nm", 0.0);
  const int instances = perfect ? 1 : dn.get("samples", 1);
  if (sigma_nm < 0.0) throw ConfigError(dn.path_of("sigma_nm"), "must be non-negative");
  if (instances < 1) throw ConfigError(dn.path_of("samples"), "must be positive");

  Node decay_node = root.child("decay");
  const bool with_decay = decay_node.get("enabled", false);
  if (with_decay && perfect) throw ConfigError(decay_node.path_of("enabled"), "decay needs mode pulse");
  const decay::DecayModel dm = load_decay(decay_node);
  const decay::DetectionMode mode = load_detection_mode(decay_node);

  const int phase_points = root.child("parity").get("points", 2 * g.size() + 2);
  if (phase_points < 2) throw ConfigError("parity.points", "need at least two phases");
  Node sn = root.child("shots");
  const int shot_count = sn.get("count", 0);
  const double loss = sn.get("loss_probability", 0.0);
  if (shot_count < 0) throw ConfigError(sn.path_of("count"), "must be non-negative");
  if (!(loss >= 0.0 && loss <= 1.0)) throw ConfigError(sn.path_of("loss_probability"), "must lie in [0, 1]");

  return [=] {
    struct Instance {
      StateVector state;
      analysis::GhzFidelity fid;
      analysis::MagnetismSummary mag;
      std::vector<analysis::G2Entry> g2;
      analysis::ParityScan scan;
      double bound = 0.0;
      std::vector<analysis::OscillationAmplitude> osc;
      decay::PostselectedResult post;
    };
    // the parity readout needs every config and a complement for each
    const bool parity = basis->mode() == BasisMode::kFull && g.size() % 2 == 0;
    const auto phis = analysis::uniform_phase_grid(phase_points);
    std::vector<Instance> res(instances);
    parallel_for(instances, ctx.threads, [&](Index k) {
      Instance& r = res[k];
      if (perfect) {
        r.state = target.state();
      } else {
        Geometry gk = g;
        if (sigma_nm > 0.0)
          gk = sample_disordered_geometry(g, DisorderSampler{sigma_nm, derive_seed(ctx.seed, std::uint64_t(k))});
        const RydbergHamiltonian ham(basis, gk, im);
        const StateVector start = StateVector::ground(basis);
        if (with_decay) {
          r.post = decay::postselected_manybody_evolution(pulse, gk, im, dm, target, mode);
          // observables of the shots that saw no decay
          r.state = propagate(start, grape::pulse_segments(pulse, ham, dm.gamma_per_us)).normalized();
        } else {
          r.state = propagate(start, grape::pulse_segments(pulse, ham));
        }
      }
      r.fid = analysis::ghz_fidelity_exact(r.state, target);
      r.mag = analysis::staggered_magnetism(r.state, g);
      r.g2 = analysis::g2_table(r.state, g);
      if (parity) {
        r.scan = analysis::parity_scan(r.state, phis);
        r.bound = analysis::coherence_lower_bound(r.scan, analysis::populations(r.state), target);
        for (int dn = 2; dn <= g.size(); dn += 2) r.osc.push_back(analysis::oscillation_amplitude(r.state, dn));
      }
    });

    ctx.write("instances.csv", [&](std::ostream& os) {
      os << "instance,fidelity,z2_population,coherence_exact";
      if (parity) os << ",coherence_bound,parity_offset";
      if (with_decay) os << ",acceptance,fidelity_postselected,fidelity_raw";
      os << '\n';
      for (int k = 0; k < instances; ++k) {
        const Instance& r = res[k];
        os << k << ',' << r.fid.fidelity << ',' << r.mag.z2_population << ',' << 2.0 * r.fid.coherence;
        if (parity) os << ',' << r.bound << ',' << r.scan.offset();
        if (with_decay) os << ',' << r.post.acceptance << ',' << r.post.fidelity_postselected << ',' << r.post.fidelity_raw;
        os << '\n';
      }
    });

    ctx.write("g2.csv", [&](std::ostream& os) {
      os << "dx,dy,g2\n";
      for (std::size_t e = 0; e < res[0].g2.size(); ++e) {
        double s = 0.0;
        for (const auto& r : res) s += r.g2[e].value;
        os << res[0].g2[e].dx << ',' << res[0].g2[e].dy << ',' << s / instances << '\n';
      }
    });

    std::map<int, double> hist;
    for (const auto& r : res)
      for (const auto& [m, p] : r.mag.histogram) hist[m] += p / instances;
    ctx.write("magnetism.csv", [&](std::ostream& os) {
      os << "M,probability\n";
      for (const auto& [m, p] : hist) os << m << ',' << p << '\n';
    });

    if (parity) ctx.write("parity.csv", [&](std::ostream& os) {
      os << "phi_rad,parity\n";
      for (std::size_t i = 0; i < phis.size(); ++i) {
        double s = 0.0;
        for (const auto& r : res) s += r.scan.parity[i];
        os << phis[i] << ',' << s / instances << '\n';
      }
    });

    if (parity) ctx.write("oscillation.csv", [&](std::ostream& os) {
      os << "delta_n,exact,bound\n";
      for (std::size_t i = 0; i < res[0].osc.size(); ++i) {
        double e = 0.0, b = 0.0;
        for (const auto& r : res) {
          e += r.osc[i].exact;
          b += r.osc[i].bound;
        }
        os << 2 * (i + 1) << ',' << e / instances << ',' << b / instances << '\n';
      }
    });

    auto column = [&](auto f) {
      std::vector<double> v;
      for (const auto& r : res) v.push_back(f(r));
      return v;
    };
    auto stat = [&](const std::vector<double>& v) { return json{{"mean", mean(v)}, {"sem", sem(v)}}; };
    json s;
    s["instances"] = instances;
    s["fidelity"] = stat(column([](const Instance& r) { return r.fid.fidelity; }));
    s["z2_population"] = stat(column([](const Instance& r) { return r.mag.z2_population; }));
    s["coherence_exact"] = stat(column([](const Instance& r) { return 2.0 * r.fid.coherence; }));
    if (parity) {
      s["parity_offset"] = stat(column([](const Instance& r) { return r.scan.offset(); }));
      s["coherence_bound"] = stat(column([](const Instance& r) { return r.bound; }));
    }
    if (with_decay) {
      s["acceptance"] = stat(column([](const Instance& r) { return r.post.acceptance; }));
      s["fidelity_postselected"] = stat(column([](const Instance& r) { return r.post.fidelity_postselected; }));
      s["fidelity_raw"] = stat(column([](const Instance& r) { return r.post.fidelity_raw; }));
    }
    ctx.write_json("summary.json", s);

    if (shot_count > 0) {
      analysis::ShotEnsemble all;
      for (int k = 0; k < instances; ++k) {
        const int n = shot_count / instances + (k < shot_count % instances ? 1 : 0);
        if (n == 0) continue;
        auto part = analysis::sample_shots(res[k].state, n, derive_seed(ctx.seed ^ 0x5107ULL, std::uint64_t(k)), loss);
        for (auto& shot : part) all.push_back(std::move(shot));
      }
      for (std::size_t i = 0; i < all.size(); ++i) all[i].shot_id = i;
      ctx.write("shots.csv", [&](std::ostream& os) { analysis::write_shots(os, all); });
    }
  };
}

}  // namespace rydsim
