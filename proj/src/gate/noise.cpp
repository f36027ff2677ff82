#include "ryd/gate/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace ryd::gate {

double Spectrum::at(double f) const {
  if (empty() || f < freq_mhz.front() || f > freq_mhz.back()) return 0.0;
  const auto it = std::upper_bound(freq_mhz.begin(), freq_mhz.end(), f);
  if (it == freq_mhz.end()) return psd.back();
  const std::size_t k = it - freq_mhz.begin();
  if (k == 0) return psd.front();
  const double w = (f - freq_mhz[k - 1]) / (freq_mhz[k] - freq_mhz[k - 1]);
  return (1 - w) * psd[k - 1] + w * psd[k];
}

void Spectrum::validate() const {
  if (freq_mhz.size() != psd.size()) throw InvalidModelError("spectrum columns differ in length");
  for (std::size_t k = 0; k < psd.size(); ++k) {
    if (!(psd[k] >= 0.0)) throw InvalidModelError("spectrum has a negative density");
    if (k > 0 && !(freq_mhz[k] > freq_mhz[k - 1])) throw InvalidModelError("spectrum frequencies must increase");
  }
}

Spectrum Spectrum::flat(double level, double f_max) { return {{0.0, f_max}, {level, level}}; }

Spectrum Spectrum::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidModelError("cannot open spectrum file " + path);
  Spectrum s;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double f, p;
    if (!(ls >> f >> p)) {
      if (s.empty()) continue;  // header
      throw InvalidModelError("bad spectrum line in " + path + ": " + line);
    }
    s.freq_mhz.push_back(f);
    s.psd.push_back(p);
  }
  s.validate();
  return s;
}

const char* channel_name(NoiseChannel c) {
  switch (c) {
    case NoiseChannel::kAcIntensity: return "ac_intensity";
    case NoiseChannel::kDcIntensity: return "dc_intensity";
    case NoiseChannel::kPointing: return "beam_pointing";
    case NoiseChannel::kSampling: return "beam_sampling";
    case NoiseChannel::kAcPhase: return "ac_phase";
    case NoiseChannel::kDoppler: return "doppler";
    case NoiseChannel::kDcField: return "dc_field";
  }
  return "?";
}

void NoiseModel::validate() const {
  intensity_psd.validate();
  frequency_psd.validate();
  for (double v : {dc_intensity_std, pointing_std, sampling_std, doppler_std})
    if (!(v >= 0.0)) throw InvalidModelError("noise widths must be non-negative");
  if (!(dc_field_high >= dc_field_low)) throw InvalidModelError("dc field interval is reversed");
  if (realizations < 1) throw InvalidModelError("need at least one noise realization");
  if (!(trace_df_mhz > 0.0)) throw InvalidModelError("trace frequency step must be positive");
}

bool NoiseModel::active() const {
  return !intensity_psd.empty() || !frequency_psd.empty() || dc_intensity_std > 0 || pointing_std > 0 ||
         sampling_std > 0 || doppler_std > 0 || dc_field_low != 0 || dc_field_high != 0;
}

NoiseModel NoiseModel::only(NoiseChannel c) const {
  NoiseModel out = none();
  out.realizations = realizations;
  out.seed = seed;
  out.trace_df_mhz = trace_df_mhz;
  switch (c) {
    case NoiseChannel::kAcIntensity: out.intensity_psd = intensity_psd; break;
    case NoiseChannel::kDcIntensity: out.dc_intensity_std = dc_intensity_std; break;
    case NoiseChannel::kPointing: out.pointing_std = pointing_std; break;
    case NoiseChannel::kSampling: out.sampling_std = sampling_std; break;
    case NoiseChannel::kAcPhase: out.frequency_psd = frequency_psd; break;
    case NoiseChannel::kDoppler: out.doppler_std = doppler_std; break;
    case NoiseChannel::kDcField:
      out.dc_field_low = dc_field_low;
      out.dc_field_high = dc_field_high;
      break;
  }
  return out;
}

NoiseModel NoiseModel::none() {
  NoiseModel n;
  n.realizations = 1;
  return n;
}

NoiseModel NoiseModel::placeholder() {
  NoiseModel n;
  n.intensity_psd = Spectrum::flat(1e-7, 10.0);  // about -130 dBc/Hz
  n.frequency_psd = Spectrum::flat(1e-5, 10.0);  // 10 Hz^2/Hz white frequency noise
  n.dc_intensity_std = 0.002;
  n.pointing_std = 0.002;
  n.sampling_std = 0.002;
  n.doppler_std = mhz(0.01);
  n.dc_field_low = -mhz(0.005);
  n.dc_field_high = mhz(0.005);
  return n;
}

namespace {

// sum_k sqrt(2 S(f_k) df) cos(2 pi f_k t + phi_k) at the given times
std::vector<double> sample_trace(const Spectrum& s, double df, const std::vector<double>& t, Rng& rng) {
  std::vector<double> x(t.size(), 0.0);
  if (s.empty()) return x;
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  const int kmax = static_cast<int>(std::floor(s.max_frequency() / df + 1e-9));
  for (int k = 1; k <= kmax; ++k) {
    const double f = k * df;
    const double amp = std::sqrt(2.0 * s.at(f) * df);
    const double phi = u(rng);
    if (amp == 0.0) continue;
    for (std::size_t j = 0; j < t.size(); ++j) x[j] += amp * std::cos(kTwoPi * f * t[j] + phi);
  }
  return x;
}

}  // namespace

std::vector<SliceControl> sample_controls(const TogPulse& pulse, const NoiseModel& noise, Rng& rng) {
  std::vector<SliceControl> c = pulse.controls();
  if (!noise.active()) return c;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> t(c.size());
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = (j + 0.5) * pulse.dt();
  // fixed draw order keeps realizations reproducible per seed
  const std::vector<double> rin = sample_trace(noise.intensity_psd, noise.trace_df_mhz, t, rng);
  const std::vector<double> nu = sample_trace(noise.frequency_psd, noise.trace_df_mhz, t, rng);
  const double common = 1.0 + noise.dc_intensity_std * gauss(rng) + noise.pointing_std * gauss(rng);
  const std::array<double, 2> site{1.0 + noise.sampling_std * gauss(rng), 1.0 + noise.sampling_std * gauss(rng)};
  const std::array<double, 2> doppler{noise.doppler_std * gauss(rng), noise.doppler_std * gauss(rng)};
  double field = 0.0;
  if (noise.dc_field_high > noise.dc_field_low)
    field = std::uniform_real_distribution<double>(noise.dc_field_low, noise.dc_field_high)(rng);
  else
    field = noise.dc_field_low;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double ac = std::sqrt(std::max(0.0, 1.0 + rin[j]));
    for (int a = 0; a < 2; ++a) {
      c[j].omega[a] *= common * site[a] * ac;
      c[j].delta[a] += kTwoPi * nu[j] + doppler[a] + field;
    }
  }
  return c;
}

}  // namespace ryd::gate
