#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sqz/chain.hpp"
#include "sqz/spectral.hpp"

namespace sqz {

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  int points = 1;
};

struct TraceSettings {
  int samples = 4096;   // points along one ramp record
  double turns = 1.0;   // ramp span in units of 2 pi (>= 1 full turn)
  double rin = 0.0;     // fractional rms intensity noise
};

/// Spectral section of the run configuration.  Dispersion lengths and table
/// wavelengths are stored in SI internally; the JSON form uses the mm / nm /
/// THz keys documented in the README.
struct SpectralSettings {
  double center_wavelength_m = 2.09e-6;
  double span_hz = 80e12;
  int bins = 1001;
  double r1_peak = 0.0;
  double r2_peak = 0.0;
  DispersionSpec squeezer_dispersion;
  DispersionSpec measurement_dispersion;
  CouplerSpectrum coupler = CouplerSpectrum::flat(0.7);
  double noise_floor = 0.0;
  double sigma_phase = 0.0;
  double threshold_db = 3.0;

  SpectralGrid grid() const;
  SpectralModelParams model_params() const;
};

struct RunConfig {
  std::uint64_t seed = 42;
  std::string out_dir;
  ChainParams chain;
  double nonlinear_strength = 1.4;  // pJ^{-1/2}; r1 = strength * sqrt(E)
  std::map<std::string, SweepRange> sweeps;
  TraceSettings traces;
  SpectralSettings spectral;

  /// Built-in defaults; config/default.json mirrors these values.
  static RunConfig defaults();

  /// Throws config_error on any invalid field.
  void validate() const;
};

/// Names of the supported sweep axes, in canonical order.
const std::map<std::string, SweepRange>& default_sweeps();

/// Coupler table derived from the three measured squeezing anchors: for each
/// (wavelength, target dB) pair, inverts the full per-bin chain readout for
/// the coupler transmissivity that reproduces the target at that wavelength.
CouplerSpectrum calibrated_coupler_table(const SpectralSettings& base);

/// Parses a JSON config (comments permitted).  Unknown keys are rejected with
/// the offending key named; missing keys fall back to defaults, except that a
/// "spectral" section, when present, must name both dispersion tables.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

/// Serializes the full validated config (every key explicit, full precision).
std::string serialize_config(const RunConfig& config);
void save_config(const RunConfig& config, const std::string& path);

}  // namespace sqz
