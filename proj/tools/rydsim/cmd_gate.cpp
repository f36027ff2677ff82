#include "commands.hpp"
#include "ryd/core/random.hpp"
#include "ryd/gate/gate_sim.hpp"

namespace rydsim {

using namespace ryd;

namespace {

// psd: {file} or {flat_level, f_max_mhz}; absent keeps the preset
void load_spectrum(Node parent, const std::string& key, gate::Spectrum& s) {
  if (!parent.has(key)) return;
  Node n = parent.child(key);
  try {
    if (n.has("file")) {
      s = gate::Spectrum::read_csv(n.file("file").string());
    } else {
      const double level = n.require<double>("flat_level");
      s = level > 0.0 ? gate::Spectrum::flat(level, n.require<double>("f_max_mhz")) : gate::Spectrum{};
    }
    if (!s.empty()) s.validate();
  } catch (const Error& e) {
    throw ConfigError(n.path(), e.what());
  }
}

gate::NoiseModel load_noise(Node n, std::uint64_t seed) {
  const std::string preset = n.choice("preset", "placeholder", {"placeholder", "none"});
  gate::NoiseModel m = preset == "none" ? gate::NoiseModel::none() : gate::NoiseModel::placeholder();
  load_spectrum(n, "intensity_psd", m.intensity_psd);
  load_spectrum(n, "frequency_psd", m.frequency_psd);
  m.dc_intensity_std = n.get("dc_intensity_std", m.dc_intensity_std);
  m.pointing_std = n.get("pointing_std", m.pointing_std);
  m.sampling_std = n.get("sampling_std", m.sampling_std);
  m.doppler_std = n.frequency("doppler_std", m.doppler_std);
  m.dc_field_low = n.frequency("dc_field_low", m.dc_field_low);
  m.dc_field_high = n.frequency("dc_field_high", m.dc_field_high);
  m.realizations = n.get("realizations", m.realizations);
  m.trace_df_mhz = n.get("trace_df_mhz", m.trace_df_mhz);
  m.seed = seed;
  try {
    m.validate();
  } catch (const Error& e) {
    throw ConfigError(n.path(), e.what());
  }
  return m;
}

json fidelity_json(const gate::GateFidelityResult& r) {
  return {{"raw_infidelity", r.raw_infidelity()},      {"raw_err", r.raw_err()},
          {"loss_detected_infidelity", r.loss_infidelity()}, {"loss_detected_err", r.loss_err()},
          {"acceptance", r.acceptance},                {"samples", r.samples}};
}

analysis::RbOffset parse_offset(const std::string& s) {
  if (s == "zero") return analysis::RbOffset::kZero;
  if (s == "half") return analysis::RbOffset::kHalf;
  if (s == "free") return analysis::RbOffset::kFree;
  return analysis::RbOffset::kQuarter;
}

}  // namespace

Runner parse_gate_bench(Node root, const RunContext& ctx) {
  const double omega = root.frequency("omega", mhz(3.0));
  const double blockade = root.frequency("blockade", mhz(200.0));
  const int slices = root.get("slices", 200);
  if (!(omega > 0.0)) throw ConfigError("omega_mhz", "must be positive");
  if (slices < 2) throw ConfigError("slices", "need at least two slices");

  Node sn = root.child("synthesis");
  gate::SynthesisOptions syn;
  syn.tolerance = sn.get("tolerance", syn.tolerance);
  syn.max_evaluations = sn.get("max_evaluations", syn.max_evaluations);
  syn.min_blockade_ratio = sn.get("min_blockade_ratio", syn.min_blockade_ratio);

  const gate::NoiseModel noise = load_noise(root.child("noise"), derive_seed(ctx.seed, 1));
  const decay::DecayModel dm = load_decay(root.child("decay"));

  Node fn = root.child("fidelity");
  const bool do_fidelity = fn.get("enabled", true);
  const bool breakdown = fn.get("breakdown", true);
  gate::GateFidelityOptions fo;
  fo.blockade = blockade;
  fo.haar_states = fn.get("haar_states", fo.haar_states);
  fo.quadrature_nodes = fn.get("quadrature_nodes", fo.quadrature_nodes);
  fo.threads = ctx.threads;
  fo.seed = derive_seed(ctx.seed, 2);
  if (fo.haar_states < 1) throw ConfigError(fn.path_of("haar_states"), "must be positive");

  Node gn = root.child("grb");
  const bool do_grb = gn.get("enabled", true);
  gate::GrbOptions go;
  go.depths = gn.get("depths", go.depths);
  go.instances = gn.get("instances", go.instances);
  go.echo = gn.get("echo", go.echo);
  go.single_qubit_error = gn.get("single_qubit_error", go.single_qubit_error);
  go.ideal = gn.choice("ideal", "cz", {"cz", "identity"}) == "cz" ? gate::IdealGate::kCz : gate::IdealGate::kIdentity;
  go.blockade = blockade;
  go.quadrature_nodes = fo.quadrature_nodes;
  go.seed = derive_seed(ctx.seed, 3);
  go.threads = ctx.threads;
  const auto offset = parse_offset(gn.choice("fit_offset", "quarter", {"zero", "quarter", "half", "free"}));
  if (do_grb && go.depths.size() < 3) throw ConfigError(gn.path_of("depths"), "the fit needs at least three depths");
  for (int d : go.depths)
    if (d < 3) throw ConfigError(gn.path_of("depths"), "every depth must be at least 3");
  if (go.instances < 1) throw ConfigError(gn.path_of("instances"), "must be positive");

  Node ln = root.child("loss");
  const bool do_loss = ln.get("enabled", false);
  gate::LossStatsOptions lo;
  lo.gates = ln.get("gates", lo.gates);
  lo.sequences = ln.get("sequences", lo.sequences);
  lo.blockade = blockade;
  lo.seed = derive_seed(ctx.seed, 4);
  lo.threads = ctx.threads;
  if (lo.gates < 2 || lo.sequences < 1) throw ConfigError(ln.path(), "need at least two gates and one sequence");

  return [=] {
    const gate::SynthesisResult syn_result = gate::synthesize_tog(omega, blockade, slices, syn);
    const gate::TogPulse& pulse = syn_result.pulse;
    json g;
    g["omega_rad_per_us"] = pulse.omega;
    g["blockade_rad_per_us"] = blockade;
    g["amplitude_rad"] = pulse.params.amplitude;
    g["frequency_ratio"] = pulse.params.frequency_ratio;
    g["offset_rad"] = pulse.params.offset;
    g["area"] = pulse.params.area;
    g["duration_us"] = pulse.duration();
    g["compensation_rad"] = pulse.compensation;
    g["slices"] = pulse.slices;
    g["closed_infidelity"] = syn_result.infidelity;
    ctx.write_json("gate.json", g);

    if (do_fidelity) {
      json f = json::array();
      if (breakdown) {
        for (const auto& c : gate::fidelity_breakdown(pulse, noise, dm, fo)) {
          f.push_back(fidelity_json(c.result));
          f.back()["channel"] = c.channel;
        }
      } else {
        f.push_back(fidelity_json(gate::simulate_gate_fidelity(pulse, noise, dm, fo)));
        f.back()["channel"] = "total";
      }
      ctx.write_json("fidelity.json", f);
    }

    if (do_grb) {
      const gate::GrbData data = gate::run_grb(pulse, noise, dm, go);
      ctx.write("grb.csv", [&](std::ostream& os) { gate::write_grb_csv(os, data); });
      json fits;
      for (int d = 0; d < gate::kGrbDetections; ++d) {
        const auto mode = static_cast<gate::GrbDetection>(d);
        const analysis::RbFit fit = gate::fit_grb(data, mode, offset);
        fits[gate::detection_name(mode)] = {{"p", fit.p},
                                            {"p_err", fit.p_err},
                                            {"a", fit.a},
                                            {"a_err", fit.a_err},
                                            {"b", fit.b},
                                            {"error_per_gate", fit.error_per_gate},
                                            {"error_per_gate_err", fit.error_per_gate_err},
                                            {"degenerate", fit.degenerate},
                                            {"note", fit.note}};
      }
      ctx.write_json("grb_fit.json", fits);
    }

    if (do_loss) {
      const gate::LossStats s = gate::correlated_loss_stats(pulse, dm, lo);
      ctx.write_json("loss.json", {{"p_single", s.p_single},
                                   {"p_single_err", s.p_single_err},
                                   {"p_corr", s.p_corr},
                                   {"p_corr_err", s.p_corr_err},
                                   {"p_single_squared", s.p_single * s.p_single}});
      ctx.write("loss.csv", [&](std::ostream& os) {
        os << "gates,single_cumulative,corr_cumulative\n";
        for (std::size_t i = 0; i < s.gate_counts.size(); ++i)
          os << s.gate_counts[i] << ',' << s.single_cumulative[i] << ',' << s.corr_cumulative[i] << '\n';
      });
    }
  };
}

}  // namespace rydsim
