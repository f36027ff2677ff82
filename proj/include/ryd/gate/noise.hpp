#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ryd/core/random.hpp"
#include "ryd/gate/tog.hpp"

namespace ryd::gate {

// One-sided power spectral density on a frequency grid in MHz, linearly
// interpolated and zero outside the grid.
struct Spectrum {
  std::vector<double> freq_mhz;
  std::vector<double> psd;

  bool empty() const { return freq_mhz.empty(); }
  double at(double f_mhz) const;
  double max_frequency() const { return empty() ? 0.0 : freq_mhz.back(); }
  void validate() const;

  static Spectrum flat(double level, double f_max_mhz);
  // two columns: frequency (MHz), PSD; a header line is skipped
  static Spectrum read_csv(const std::string& path);
};

enum class NoiseChannel { kAcIntensity = 0, kDcIntensity, kPointing, kSampling, kAcPhase, kDoppler, kDcField };
inline constexpr int kNoiseChannels = 7;
const char* channel_name(NoiseChannel c);

struct NoiseModel {
  // relative intensity noise, 1/MHz; Omega follows sqrt(I)
  Spectrum intensity_psd;
  // laser frequency noise, MHz^2/MHz; enters as a common detuning 2 pi nu(t)
  Spectrum frequency_psd;
  double dc_intensity_std = 0.0;  // relative Omega, common to both atoms
  double pointing_std = 0.0;      // relative Omega, common
  double sampling_std = 0.0;      // relative Omega, independent per atom
  double doppler_std = 0.0;       // rad/us, independent per atom
  double dc_field_low = 0.0;      // rad/us, uniform common offset
  double dc_field_high = 0.0;
  int realizations = 1000;
  std::uint64_t seed = 1;
  // Traces are sums of cosines at k * df, k = 1..f_max/df, with random phases
  // and amplitudes sqrt(2 S(f) df), evaluated at slice midpoints.
  double trace_df_mhz = 0.01;

  void validate() const;
  bool active() const;
  NoiseModel only(NoiseChannel c) const;

  static NoiseModel none();
  // Flat placeholder spectra and shot-to-shot widths of a plausible scale.
  static NoiseModel placeholder();
};

// One noise realization of the slice controls.
std::vector<SliceControl> sample_controls(const TogPulse& pulse, const NoiseModel& noise, Rng& rng);

}  // namespace ryd::gate
