#pragma once

#include <vector>

#include "sqz/chain.hpp"
#include "sqz/exec.hpp"

namespace sqz {

/// Frequency grid around the degeneracy point: angular-frequency detunings
/// Omega (rad/s), strictly increasing and symmetric about 0, plus the carrier
/// wavelength that fixes the absolute frequency of each bin.
struct SpectralGrid {
  double center_wavelength = 2.09e-6;  // m
  std::vector<double> offsets;         // rad/s

  /// Uniform symmetric grid covering [-span_hz/2, +span_hz/2] in ordinary
  /// frequency with `bins` points (odd counts include the exact center).
  static SpectralGrid uniform(double center_wavelength, double span_hz, int bins);

  void validate() const;

  int bins() const { return static_cast<int>(offsets.size()); }
  double center_frequency_hz() const;
  double frequency_hz(int i) const;
  double wavelength_m(int i) const;
};

/// Phase-mismatch model of one poled waveguide.  Odd dispersion orders cancel
/// for the degenerate signal/idler pair, leaving
///   delta_k(Omega) = delta_k0 + beta2 Omega^2 + (beta4 / 12) Omega^4.
struct DispersionSpec {
  double delta_k0 = 0.0;  // 1/m
  double beta2 = 0.0;     // s^2/m
  double beta4 = 0.0;     // s^4/m
  double length = 2.5e-3; // m

  void validate() const;

  double phase_mismatch(double omega_offset) const;

  /// beta2-only spec whose sinc^2 gain profile has the requested half-power
  /// full width (in ordinary frequency) for the given poled length.
  static DispersionSpec for_half_power_width(double width_hz, double length);
};

/// Positive root of sinc(x)^2 = 1/2 (approximately 1.3916), solved
/// numerically rather than hard-coded.
double half_power_sinc_argument();

/// Coupler power transmissivity versus wavelength: a small measured table
/// interpolated with a monotone (Fritsch-Carlson) cubic, clamped to the end
/// values outside the tabulated range.
struct CouplerSpectrum {
  std::vector<double> wavelength_m;  // ascending
  std::vector<double> eta;           // in [0, 1]

  static CouplerSpectrum flat(double eta_value);

  void validate() const;

  double operator()(double wavelength) const;
};

struct SpectralModelParams {
  double r1_peak = 1.0;
  double r2_peak = 5.0;
  DispersionSpec squeezer_dispersion;
  DispersionSpec measurement_dispersion;
  CouplerSpectrum coupler = CouplerSpectrum::flat(0.7);
  double noise_floor = 0.0;
  double sigma_phase = 0.0;

  void validate() const;
};

/// Low-gain phase-matching profile r(Omega) = r_peak |sinc(delta_k L / 2)|,
/// applied at all gains (documented approximation).
double gain_at(const DispersionSpec& d, double r_peak, double omega_offset);
std::vector<double> gain_profile(const DispersionSpec& d, double r_peak,
                                 const SpectralGrid& grid);

/// Per-bin squeezing of the chain with r1, r2 and the coupler transmissivity
/// evaluated on the grid.  Each (Omega, -Omega) pair is treated as an
/// independent degenerate channel.  Bins are independent, so the parallel
/// policy distributes them across OpenMP threads; results match
/// squeezing_spectrum_serial exactly.
std::vector<SqueezingResult> squeezing_spectrum(const SpectralModelParams& p,
                                                const SpectralGrid& grid,
                                                Exec exec = Exec::parallel);

/// Reference loop for squeezing_spectrum.
std::vector<SqueezingResult> squeezing_spectrum_serial(const SpectralModelParams& p,
                                                       const SpectralGrid& grid);

struct BandwidthResult {
  double width_hz = 0.0;
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;
  bool saturated = false;  // spectrum never dropped below the threshold in-grid
};

/// Full width (ordinary frequency) of the contiguous region around the peak
/// where `values_db` stays within threshold_db of its maximum, with linear
/// interpolation at the crossings.  For squeezing spectra pass |s_minus_db|.
/// If the values never drop below the level on one or both sides, the width
/// is clipped to the grid edge and the saturated flag is set.
BandwidthResult bandwidth(const std::vector<double>& values_db,
                          const std::vector<double>& frequencies_hz,
                          double threshold_db);

enum class PulseShape { gaussian_fit, transform_limit_numeric };

struct TemporalCharacterization {
  double cycles = 0.0;      // intensity-FWHM duration over the carrier period
  double duration_s = 0.0;  // transform-limited intensity FWHM
  PulseShape shape = PulseShape::gaussian_fit;
  bool saturated = false;   // grid resolution or window limited the estimate
};

/// Transform-limited duration of the temporal mode whose spectral amplitude
/// is the square root of the linear squeezing-magnitude spectrum, in optical
/// cycles of the carrier.
///
/// gaussian_fit            interprets the spectral FWHM as Gaussian and uses
///                         the time-bandwidth product (2 ln 2 / pi).
/// transform_limit_numeric Fourier-transforms the amplitude directly and
///                         measures the intensity FWHM on a dense time grid.
TemporalCharacterization temporal_cycles(const std::vector<double>& magnitudes,
                                         const SpectralGrid& grid, PulseShape shape);

}  // namespace sqz
