#pragma once

#include <vector>

#include "sqz/exec.hpp"
#include "sqz/units.hpp"

namespace sqz {

/// Parameters of the two-stage squeezing chain: a squeezer OPA (r1), an
/// adiabatic coupler of power transmissivity eta_coupler, a high-gain
/// measurement OPA (r2) whose pump phase phi_pump2 selects the amplified
/// quadrature, detection of efficiency eta_det, and a photon readout with an
/// additive background of noise_floor photons.
struct ChainParams {
  double r1 = units::r_from_gain_db(10.6);
  double r2 = units::r_from_gain_db(50.0);
  double phi_pump2 = 0.0;      // rad; rotates the amplified quadrature by phi/2
  double eta_coupler = 0.7;    // power transmissivity between the two OPAs
  double eta_det = 1.0;        // detection efficiency after the measurement OPA
  double pump_leak = 0.2;      // power fraction of squeezer pump reaching OPA 2
  double sigma_phase = 0.0;    // rad; rms Gaussian jitter of phi_pump2
  double noise_floor = 10.0;   // photons added to every readout

  void validate() const;       // throws std::invalid_argument on bad fields
};

struct SqueezingResult {
  double s_minus_db = 0.0;  // detected squeezing level, <= 0 for real squeezing
  double s_plus_db = 0.0;   // detected anti-squeezing level
  double n_minus = 0.0;     // readout photons, squeezed quadrature amplified
  double n_plus = 0.0;      // readout photons, anti-squeezed quadrature amplified
  double n_vac = 0.0;       // readout photons with the squeezer off
};

struct IdealSqueezing {
  double s_minus_db = 0.0;
  double s_plus_db = 0.0;
  bool gain_insufficient = false;  // set when r1 > r2 (readout saturates)
};

struct LossySqueezing {
  double s_minus_db = 0.0;
  double s_plus_db = 0.0;
};

struct DetectionLossTolerance {
  double loss_db = 0.0;
  bool unbounded = false;  // degradation target unreachable for any loss
};

/// Finite-gain readout levels for a lossless chain,
///   s_+- = 10 log10( sinh^2(r2 +- r1) / sinh^2(r2) ).
/// Requires r2 > 0; r1 may be any finite value.
IdealSqueezing ideal_squeezing(double r1, double r2);

/// Squeezing and anti-squeezing of a squeezed vacuum after a loss channel,
///   s_+- = 10 log10( (1 - eta) + eta e^{+-2r} ),
/// the infinite-gain ceiling set by optical loss alone.
LossySqueezing lossy_squeezing_limit(double r, double eta);

/// Mean readout photons for one pass through the chain, built from the
/// Gaussian-state operations (vacuum -> squeeze r1 -> coupler loss -> pump
/// phase rotation with jitter -> squeeze r2 -> detection loss -> photon
/// count + noise floor).  `phi_pump2` overrides the field in `p`;
/// `squeezer_on` = false deactivates the first OPA for shot-noise readings.
double detected_photons(const ChainParams& p, double phi_pump2, bool squeezer_on);

/// Runs the chain at phi_pump2 = 0 (n_plus), pi (n_minus) and with the
/// squeezer off (n_vac); squeezing levels are 10 log10(n_+- / n_vac).
SqueezingResult simulate_chain(const ChainParams& p);

/// Phase-averaged variance of a quadrature under Gaussian phase jitter of
/// width sigma (rad) on the measured angle:
///   v_sq + (v_anti - v_sq) * (1 - e^{-2 sigma^2}) / 2.
double dephased_variance(double v_squeezed, double v_antisqueezed, double sigma);

/// Smallest measurement-OPA gain (dB) for which the finite-gain squeezing
/// readout deviates from the asymptotic value -10 log10(e^{2 r1}) by at most
/// `tolerance_db`.  The deviation is monotone in r2, so the result is unique.
double required_measurement_gain(double r1, double tolerance_db);

/// Largest detection loss (dB, positive) the chain tolerates before the
/// detected squeezing degrades by `degradation_db` relative to eta_det = 1.
/// With noise_floor = 0 the readout ratio is loss-independent and the
/// tolerance is unbounded.
DetectionLossTolerance detection_loss_tolerance(const ChainParams& p,
                                                double degradation_db);

/// Batch kernel over independent parameter sets (sweeps, spectra).  The
/// parallel policy distributes points across OpenMP threads; results are
/// identical to simulate_many_serial.
std::vector<SqueezingResult> simulate_many(const std::vector<ChainParams>& points,
                                           Exec exec = Exec::parallel);

/// Reference loop for simulate_many, kept for consistency tests and the
/// benchmark comparison.
std::vector<SqueezingResult> simulate_many_serial(const std::vector<ChainParams>& points);

}  // namespace sqz
