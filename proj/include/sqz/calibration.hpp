#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqz/chain.hpp"
#include "sqz/exec.hpp"

namespace sqz {

enum class TraceLabel { squeezing_run, shotnoise_original, shotnoise_max, shotnoise_min };

std::string to_string(TraceLabel label);
TraceLabel trace_label_from_string(const std::string& name);

/// Sampled power-versus-ramp-phase record emulating a zero-span measurement
/// while the relative pump phase is swept.
struct ZeroSpanTrace {
  TraceLabel label = TraceLabel::squeezing_run;
  std::uint64_t rng_seed = 0;
  std::vector<double> ramp_phase;  // rad
  std::vector<double> power;       // mean detected photons, >= 0

  void validate() const;  // equal lengths >= 16, nonnegative powers
};

using TraceSet = std::vector<ZeroSpanTrace>;

/// Synthesizes the four calibration traces of one squeezing run.
///
/// The leaked squeezer pump interferes with pump 2, modulating the effective
/// measurement gain along the ramp: A_eff(phi) = |1 + sqrt(pump_leak) e^{i phi}|
/// and r2_eff = r2 * A_eff.  The squeezing_run trace sweeps phi with the
/// squeezer on; shotnoise_max / shotnoise_min are flat traces taken with the
/// squeezer blocked at the pump powers of the interference extrema
/// (r2 * (1 +- sqrt(pump_leak))); shotnoise_original at the unmodified power.
/// Multiplicative Gaussian noise of fractional sigma `rin` is applied to each
/// trace with a per-label generator derived from `seed`, so a fixed seed gives
/// bit-identical traces regardless of the execution policy.
TraceSet synthesize_traces(const ChainParams& p, const std::vector<double>& ramp,
                           double rin, std::uint64_t seed, Exec exec = Exec::parallel);

/// Squeezing/anti-squeezing read off the traces the way the zero-span plot is
/// read: s_minus = 10 log10(min(squeezing_run) / mean(shotnoise_min)) and
/// s_plus = 10 log10(max(squeezing_run) / mean(shotnoise_max)), with optional
/// box smoothing of the squeezing_run trace (odd window, 1 = none).  Reported
/// photon numbers are rescaled to the unmodulated shot-noise reference so that
/// s_+- = 10 log10(n_+- / n_vac) holds exactly.
SqueezingResult extract_squeezing(const TraceSet& traces, int smoothing_window = 1);

struct LossFitResult {
  double eta_hat = 0.0;               // NaN when underdetermined
  std::vector<double> r_hat;          // one squeeze parameter per data point
  double residual_db = 0.0;           // RMS misfit in dB space
  double inferred_squeezing_db = 0.0; // 10 log10 e^{2 max r_hat}
  bool underdetermined = false;
};

struct LossPoint {
  double s_plus_db = 0.0;
  double s_minus_db = 0.0;
};

/// Least-squares fit (dB space, equal weights) of
///   s_+- = 10 log10((1 - eta) + eta e^{+-2 r_i})
/// with one shared eta and a squeeze parameter per point.  The inner solve
/// for each r_i is a bounded 1-D minimisation nested inside a bounded 1-D
/// search over eta in [0, 1].
LossFitResult fit_loss_model(const std::vector<LossPoint>& data);

struct GainFitResult {
  double g_hat = 0.0;            // nonlinear strength, r = g sqrt(E [pJ])
  double eta_overall_hat = 0.0;  // overall detection efficiency in [0, 1]
  double residual = 0.0;         // relative RMS misfit
};

struct GainPoint {
  double energy_pj = 0.0;
  double photons = 0.0;
};

/// Fit of N(E) = eta_overall sinh^2(g sqrt(E)) in relative least squares
/// (eta has a closed-form optimum for fixed g, the g search is 1-D bounded).
GainFitResult fit_gain_curve(const std::vector<GainPoint>& data);

/// Inverts s_plus = 10 log10((1 - eta) + eta e^{2r}) and returns the squeezer
/// gain 10 log10 e^{2r} in dB.
double gain_from_antisqueezing(double s_plus_db, double eta);

/// Monte-Carlo repetition of synthesize -> extract over consecutive seeds
/// [seed0, seed0 + n_seeds).  Seeds are independent, so the parallel policy
/// distributes them across OpenMP threads with per-seed generators; results
/// are identical to the serial policy.
std::vector<SqueezingResult> extraction_spread(const ChainParams& p,
                                               const std::vector<double>& ramp,
                                               double rin, std::uint64_t seed0,
                                               int n_seeds, Exec exec = Exec::parallel);

/// Trace CSV: comment line `# label=<label> seed=<seed>`, header
/// `ramp_phase_rad,power_photons`, one row per sample at full precision.
void write_trace_csv(const std::string& path, const ZeroSpanTrace& trace);
ZeroSpanTrace read_trace_csv(const std::string& path);

}  // namespace sqz
