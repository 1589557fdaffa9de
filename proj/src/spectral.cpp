#include "sqz/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sqz/units.hpp"

namespace sqz {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Interpolated abscissa where a piecewise-linear curve crosses `level`,
// walking from the peak at index `peak` in direction `step`.  Returns the
// grid end (and sets `clipped`) if the curve never drops below the level.
double crossing_from_peak(const std::vector<double>& x, const std::vector<double>& y,
                          int peak, int step, double level, bool& clipped) {
  const int n = static_cast<int>(x.size());
  int i = peak;
  while (true) {
    const int j = i + step;
    if (j < 0 || j >= n) {
      clipped = true;
      return x[i];
    }
    if (y[j] < level) {
      const double t = (y[i] - level) / (y[i] - y[j]);
      return x[i] + t * (x[j] - x[i]);
    }
    i = j;
  }
}

struct WidthAtLevel {
  double width = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool clipped = false;
};

WidthAtLevel width_at_level(const std::vector<double>& x, const std::vector<double>& y,
                            double level) {
  const int peak = static_cast<int>(
      std::max_element(y.begin(), y.end()) - y.begin());
  WidthAtLevel out;
  bool clip_lo = false;
  bool clip_hi = false;
  out.lo = crossing_from_peak(x, y, peak, -1, level, clip_lo);
  out.hi = crossing_from_peak(x, y, peak, +1, level, clip_hi);
  out.clipped = clip_lo || clip_hi;
  out.width = out.hi - out.lo;
  return out;
}

}  // namespace

SpectralGrid SpectralGrid::uniform(double center_wavelength, double span_hz, int bins) {
  if (!(center_wavelength > 0.0)) {
    throw std::invalid_argument("center wavelength must be positive");
  }
  if (!(span_hz > 0.0)) throw std::invalid_argument("frequency span must be positive");
  if (bins < 2) throw std::invalid_argument("grid needs at least 2 bins");
  SpectralGrid grid;
  grid.center_wavelength = center_wavelength;
  grid.offsets.resize(bins);
  const double half = std::numbers::pi * span_hz;  // 2*pi * span/2
  for (int i = 0; i < bins; ++i) {
    grid.offsets[i] = -half + 2.0 * half * i / (bins - 1);
  }
  // Force exact antisymmetry of the endpoints against accumulated rounding.
  for (int i = 0, j = bins - 1; i < j; ++i, --j) {
    const double a = (grid.offsets[j] - grid.offsets[i]) / 2.0;
    grid.offsets[i] = -a;
    grid.offsets[j] = a;
  }
  if (bins % 2 == 1) grid.offsets[bins / 2] = 0.0;
  grid.validate();
  return grid;
}

void SpectralGrid::validate() const {
  if (!(center_wavelength > 0.0)) {
    throw std::invalid_argument("center wavelength must be positive");
  }
  if (offsets.size() < 2) throw std::invalid_argument("grid needs at least 2 bins");
  double scale = 0.0;
  for (double w : offsets) scale = std::max(scale, std::abs(w));
  for (std::size_t i = 1; i < offsets.size(); ++i) {
    if (!(offsets[i] > offsets[i - 1])) {
      throw std::invalid_argument("grid offsets must be strictly increasing");
    }
  }
  for (std::size_t i = 0, j = offsets.size() - 1; i < j; ++i, --j) {
    if (std::abs(offsets[i] + offsets[j]) > 1e-9 * scale) {
      throw std::invalid_argument("grid offsets must be symmetric about zero");
    }
  }
}

double SpectralGrid::center_frequency_hz() const {
  return units::speed_of_light / center_wavelength;
}

double SpectralGrid::frequency_hz(int i) const {
  return center_frequency_hz() + offsets.at(i) / (2.0 * std::numbers::pi);
}

double SpectralGrid::wavelength_m(int i) const {
  return units::speed_of_light / frequency_hz(i);
}

void DispersionSpec::validate() const {
  if (!(length > 0.0)) throw std::invalid_argument("poled length must be positive");
  if (!std::isfinite(delta_k0) || !std::isfinite(beta2) || !std::isfinite(beta4)) {
    throw std::invalid_argument("dispersion coefficients must be finite");
  }
}

double DispersionSpec::phase_mismatch(double omega_offset) const {
  const double w2 = omega_offset * omega_offset;
  return delta_k0 + beta2 * w2 + (beta4 / 12.0) * w2 * w2;
}

double half_power_sinc_argument() {
  // sinc^2 decreases monotonically from 1 on [0, pi]; bisect sinc^2 = 1/2.
  double lo = 0.0;
  double hi = std::numbers::pi;
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2.0;
    const double s = sinc(mid);
    (s * s > 0.5 ? lo : hi) = mid;
  }
  return (lo + hi) / 2.0;
}

DispersionSpec DispersionSpec::for_half_power_width(double width_hz, double length) {
  if (!(width_hz > 0.0)) throw std::invalid_argument("target width must be positive");
  if (!(length > 0.0)) throw std::invalid_argument("poled length must be positive");
  // Half-power edge sits at Omega_h = pi * width_hz where
  // beta2 * Omega_h^2 * length / 2 = half_power_sinc_argument().
  const double omega_h = std::numbers::pi * width_hz;
  DispersionSpec d;
  d.beta2 = 2.0 * half_power_sinc_argument() / (omega_h * omega_h * length);
  d.length = length;
  return d;
}

CouplerSpectrum CouplerSpectrum::flat(double eta_value) {
  CouplerSpectrum c;
  c.wavelength_m = {1.0};
  c.eta = {eta_value};
  c.validate();
  return c;
}

void CouplerSpectrum::validate() const {
  if (wavelength_m.empty() || wavelength_m.size() != eta.size()) {
    throw std::invalid_argument("coupler table needs matching, nonempty columns");
  }
  for (std::size_t i = 1; i < wavelength_m.size(); ++i) {
    if (!(wavelength_m[i] > wavelength_m[i - 1])) {
      throw std::invalid_argument("coupler wavelengths must be strictly increasing");
    }
  }
  for (double e : eta) {
    if (!(e >= 0.0 && e <= 1.0)) {
      throw std::invalid_argument("coupler transmissivities must lie in [0, 1]");
    }
  }
}

double CouplerSpectrum::operator()(double wavelength) const {
  validate();
  const auto& xs = wavelength_m;
  const auto& ys = eta;
  const std::size_t n = xs.size();
  if (n == 1 || wavelength <= xs.front()) return wavelength <= xs.front() ? ys.front() : ys.back();
  if (wavelength >= xs.back()) return ys.back();

  // Fritsch-Carlson monotone cubic: shape-preserving, so interpolated values
  // never leave the [0, 1] range spanned by the table.
  std::vector<double> h(n - 1), slope(n - 1), m(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = xs[i + 1] - xs[i];
    slope[i] = (ys[i + 1] - ys[i]) / h[i];
  }
  m[0] = slope[0];
  m[n - 1] = slope[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (slope[i - 1] * slope[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (slope[i] == 0.0) {
      m[i] = m[i + 1] = 0.0;
      continue;
    }
    const double a = m[i] / slope[i];
    const double b = m[i + 1] / slope[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      m[i] = t * a * slope[i];
      m[i + 1] = t * b * slope[i];
    }
  }
  std::size_t k = 0;
  while (k + 2 < n && wavelength > xs[k + 1]) ++k;
  const double t = (wavelength - xs[k]) / h[k];
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * ys[k] + h10 * h[k] * m[k] + h01 * ys[k + 1] + h11 * h[k] * m[k + 1];
}

void SpectralModelParams::validate() const {
  if (!(r1_peak >= 0.0)) throw std::invalid_argument("r1_peak must be >= 0");
  if (!(r2_peak >= 0.0)) throw std::invalid_argument("r2_peak must be >= 0");
  squeezer_dispersion.validate();
  measurement_dispersion.validate();
  coupler.validate();
  if (!(noise_floor >= 0.0)) throw std::invalid_argument("noise_floor must be >= 0");
  if (!(sigma_phase >= 0.0)) throw std::invalid_argument("sigma_phase must be >= 0");
}

double gain_at(const DispersionSpec& d, double r_peak, double omega_offset) {
  if (!(r_peak >= 0.0)) throw std::invalid_argument("r_peak must be >= 0");
  return r_peak * std::abs(sinc(d.phase_mismatch(omega_offset) * d.length / 2.0));
}

std::vector<double> gain_profile(const DispersionSpec& d, double r_peak,
                                 const SpectralGrid& grid) {
  d.validate();
  grid.validate();
  std::vector<double> out(grid.offsets.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = gain_at(d, r_peak, grid.offsets[i]);
  }
  return out;
}

namespace {

ChainParams bin_params(const SpectralModelParams& p, const SpectralGrid& grid,
                       const std::vector<double>& r1, const std::vector<double>& r2,
                       int i) {
  ChainParams c;
  c.r1 = r1[i];
  c.r2 = r2[i];
  c.phi_pump2 = 0.0;
  c.eta_coupler = p.coupler(grid.wavelength_m(i));
  c.eta_det = 1.0;
  c.pump_leak = 0.0;
  c.sigma_phase = p.sigma_phase;
  c.noise_floor = p.noise_floor;
  return c;
}

}  // namespace

std::vector<SqueezingResult> squeezing_spectrum_serial(const SpectralModelParams& p,
                                                       const SpectralGrid& grid) {
  p.validate();
  grid.validate();
  const auto r1 = gain_profile(p.squeezer_dispersion, p.r1_peak, grid);
  const auto r2 = gain_profile(p.measurement_dispersion, p.r2_peak, grid);
  std::vector<SqueezingResult> out(grid.offsets.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = simulate_chain(bin_params(p, grid, r1, r2, static_cast<int>(i)));
  }
  return out;
}

std::vector<SqueezingResult> squeezing_spectrum(const SpectralModelParams& p,
                                                const SpectralGrid& grid, Exec exec) {
  if (exec == Exec::serial) return squeezing_spectrum_serial(p, grid);
  p.validate();
  grid.validate();
  const auto r1 = gain_profile(p.squeezer_dispersion, p.r1_peak, grid);
  const auto r2 = gain_profile(p.measurement_dispersion, p.r2_peak, grid);
  std::vector<SqueezingResult> out(grid.offsets.size());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = simulate_chain(bin_params(p, grid, r1, r2, static_cast<int>(i)));
  }
  return out;
}

BandwidthResult bandwidth(const std::vector<double>& values_db,
                          const std::vector<double>& frequencies_hz,
                          double threshold_db) {
  if (values_db.empty() || values_db.size() != frequencies_hz.size()) {
    throw std::invalid_argument("bandwidth needs matching, nonempty value/frequency vectors");
  }
  if (!(threshold_db > 0.0)) throw std::invalid_argument("threshold must be positive");
  const double peak = *std::max_element(values_db.begin(), values_db.end());
  const auto w = width_at_level(frequencies_hz, values_db, peak - threshold_db);
  BandwidthResult out;
  out.width_hz = w.width;
  out.f_lo_hz = w.lo;
  out.f_hi_hz = w.hi;
  out.saturated = w.clipped;
  return out;
}

TemporalCharacterization temporal_cycles(const std::vector<double>& magnitudes,
                                         const SpectralGrid& grid, PulseShape shape) {
  grid.validate();
  if (magnitudes.size() != grid.offsets.size()) {
    throw std::invalid_argument("spectrum length does not match grid");
  }
  double peak = 0.0;
  for (double m : magnitudes) {
    if (!(m >= 0.0)) throw std::invalid_argument("spectral magnitudes must be >= 0");
    peak = std::max(peak, m);
  }
  if (peak == 0.0) {
    throw std::domain_error("all-zero spectrum has no defined temporal mode");
  }

  TemporalCharacterization out;
  out.shape = shape;
  const double carrier_period = grid.center_wavelength / units::speed_of_light;

  if (shape == PulseShape::gaussian_fit) {
    // Treat the magnitude spectrum as the intensity profile of a Gaussian
    // pulse: duration = (2 ln 2 / pi) / FWHM_f (intensity time-bandwidth
    // product of a transform-limited Gaussian).
    std::vector<double> freq(grid.offsets.size());
    for (std::size_t i = 0; i < freq.size(); ++i) {
      freq[i] = grid.offsets[i] / (2.0 * std::numbers::pi);
    }
    const auto w = width_at_level(freq, magnitudes, peak / 2.0);
    double min_spacing = freq[1] - freq[0];
    for (std::size_t i = 1; i < freq.size(); ++i) {
      min_spacing = std::min(min_spacing, freq[i] - freq[i - 1]);
    }
    // A width at the resolution floor (or clipped at the grid edge) is not a
    // measurement; report it but flag it.
    out.saturated = w.clipped || w.width <= 2.0 * min_spacing;
    const double fwhm_f = std::max(w.width, min_spacing);
    out.duration_s = (2.0 * std::numbers::ln2 / std::numbers::pi) / fwhm_f;
    out.cycles = out.duration_s / carrier_period;
    return out;
  }

  // Direct transform limit: spectral amplitude = sqrt(magnitude) with flat
  // phase; intensity FWHM measured on a dense time grid spanning the full
  // unaliased window of the discrete spectrum.
  const std::size_t nbins = magnitudes.size();
  std::vector<double> amplitude(nbins);
  for (std::size_t i = 0; i < nbins; ++i) amplitude[i] = std::sqrt(magnitudes[i]);
  double min_domega = grid.offsets[1] - grid.offsets[0];
  for (std::size_t i = 1; i < nbins; ++i) {
    min_domega = std::min(min_domega, grid.offsets[i] - grid.offsets[i - 1]);
  }
  const double window = 2.0 * std::numbers::pi / min_domega;  // alias period
  const int samples = static_cast<int>(16 * nbins);
  std::vector<double> t(samples), intensity(samples);
  for (int k = 0; k < samples; ++k) {
    t[k] = -window / 2.0 + window * k / (samples - 1);
    std::complex<double> field(0.0, 0.0);
    for (std::size_t i = 0; i < nbins; ++i) {
      field += amplitude[i] * std::polar(1.0, -grid.offsets[i] * t[k]);
    }
    intensity[k] = std::norm(field);
  }
  const double ipeak = *std::max_element(intensity.begin(), intensity.end());
  const auto w = width_at_level(t, intensity, ipeak / 2.0);
  out.saturated = w.clipped;
  out.duration_s = w.width;
  out.cycles = out.duration_s / carrier_period;
  return out;
}

}  // namespace sqz
