#include "sqz/chain.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sqz/gaussian.hpp"

namespace sqz {

namespace {

void check_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

void check_nonnegative(double x, const char* what) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
  }
}

// Gaussian-jitter average of a rotation by theta with rms width sigma applied
// to a single-mode covariance: the isotropic part is invariant, the traceless
// part rotates by 2*theta and shrinks by e^{-2 sigma^2}.  The mean shrinks by
// e^{-sigma^2/2}.  Exact for Gaussian-distributed angles; reduces to a plain
// rotation at sigma = 0.
GaussianState dephased_rotation(const GaussianState& state, double theta, double sigma) {
  const auto& v = state.cov();
  const double iso = (v(0, 0) + v(1, 1)) / 2.0;
  const double d = (v(0, 0) - v(1, 1)) / 2.0;
  const double e = v(0, 1);
  const double shrink = std::exp(-2.0 * sigma * sigma);
  const double c2 = std::cos(2.0 * theta);
  const double s2 = std::sin(2.0 * theta);
  const double dr = shrink * (d * c2 - e * s2);
  const double er = shrink * (d * s2 + e * c2);
  Eigen::MatrixXd cov(2, 2);
  cov << iso + dr, er, er, iso - dr;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::VectorXd mean(2);
  const double damp = std::exp(-sigma * sigma / 2.0);
  mean << damp * (c * state.mean()(0) - s * state.mean()(1)),
      damp * (s * state.mean()(0) + c * state.mean()(1));
  return GaussianState(std::move(mean), std::move(cov));
}

}  // namespace

void ChainParams::validate() const {
  check_nonnegative(r1, "r1");
  check_nonnegative(r2, "r2");
  if (!std::isfinite(phi_pump2)) throw std::invalid_argument("phi_pump2 must be finite");
  check_unit_interval(eta_coupler, "eta_coupler");
  check_unit_interval(eta_det, "eta_det");
  check_unit_interval(pump_leak, "pump_leak");
  check_nonnegative(sigma_phase, "sigma_phase");
  check_nonnegative(noise_floor, "noise_floor");
}

IdealSqueezing ideal_squeezing(double r1, double r2) {
  if (!std::isfinite(r1)) throw std::invalid_argument("r1 must be finite");
  if (!(r2 > 0.0) || !std::isfinite(r2)) {
    throw std::domain_error("r2 must be positive (sinh^2(r2) divides the readout)");
  }
  const double denom = std::sinh(r2);
  const double sm = std::sinh(r2 - r1) / denom;
  const double sp = std::sinh(r2 + r1) / denom;
  IdealSqueezing out;
  out.s_minus_db = units::db_from_ratio(sm * sm);
  out.s_plus_db = units::db_from_ratio(sp * sp);
  out.gain_insufficient = r1 > r2;
  return out;
}

LossySqueezing lossy_squeezing_limit(double r, double eta) {
  if (!std::isfinite(r)) throw std::invalid_argument("r must be finite");
  check_unit_interval(eta, "eta");
  LossySqueezing out;
  out.s_minus_db = units::db_from_ratio((1.0 - eta) + eta * std::exp(-2.0 * r));
  out.s_plus_db = units::db_from_ratio((1.0 - eta) + eta * std::exp(2.0 * r));
  return out;
}

double detected_photons(const ChainParams& p, double phi_pump2, bool squeezer_on) {
  p.validate();
  if (!std::isfinite(phi_pump2)) throw std::invalid_argument("phi_pump2 must be finite");
  GaussianState state = vacuum(1);
  if (squeezer_on && p.r1 != 0.0) state = squeeze(state, 0, p.r1, 0.0);
  state = loss_channel(state, 0, p.eta_coupler);
  // Pump phase phi rotates the amplified quadrature by phi/2; pump-phase
  // jitter of rms sigma_phase therefore dephases the frame by sigma_phase/2.
  const double theta = phi_pump2 / 2.0;
  const double sigma = p.sigma_phase / 2.0;
  if (sigma > 0.0) {
    state = dephased_rotation(state, theta, sigma);
  } else if (theta != 0.0) {
    state = rotate(state, 0, theta);
  }
  state = squeeze(state, 0, p.r2, 0.0);
  state = loss_channel(state, 0, p.eta_det);
  return mean_photon(state, 0) + p.noise_floor;
}

SqueezingResult simulate_chain(const ChainParams& p) {
  SqueezingResult out;
  out.n_plus = detected_photons(p, 0.0, true);
  out.n_minus = detected_photons(p, std::numbers::pi, true);
  out.n_vac = detected_photons(p, 0.0, false);
  if (!(out.n_vac > 0.0)) {
    throw std::domain_error("shot-noise reading is zero; cannot normalise (r2 = 0 and noise_floor = 0)");
  }
  out.s_minus_db = units::db_from_ratio(out.n_minus / out.n_vac);
  out.s_plus_db = units::db_from_ratio(out.n_plus / out.n_vac);
  return out;
}

double dephased_variance(double v_squeezed, double v_antisqueezed, double sigma) {
  if (!(v_squeezed > 0.0) || !(v_antisqueezed > 0.0)) {
    throw std::invalid_argument("quadrature variances must be positive");
  }
  check_nonnegative(sigma, "sigma");
  return v_squeezed +
         (v_antisqueezed - v_squeezed) * (1.0 - std::exp(-2.0 * sigma * sigma)) / 2.0;
}

double required_measurement_gain(double r1, double tolerance_db) {
  if (!(r1 > 0.0) || !std::isfinite(r1)) throw std::invalid_argument("r1 must be positive");
  if (!(tolerance_db > 0.0)) throw std::invalid_argument("tolerance must be positive");
  // Deviation of the finite-gain readout from the asymptote -10 log10 e^{2 r1},
  // written in the gain excess delta = r2 - r1 > 0:
  //   dev(delta) = 20 log10( (1 - e^{-2(r1+delta)}) / (1 - e^{-2 delta}) ),
  // positive and strictly decreasing in delta, which makes bisection valid.
  // The readout converges to the asymptote from below (finite-gain overshoot
  // of the squeezed arm), so |.| equals the expression above on this branch.
  const auto deviation = [r1](double delta) {
    return 20.0 * std::log10(-std::expm1(-2.0 * (r1 + delta)) / -std::expm1(-2.0 * delta));
  };
  double lo = 1e-12;
  double hi = 1.0;
  while (deviation(hi) > tolerance_db) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("required gain bracket failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2.0;
    (deviation(mid) > tolerance_db ? lo : hi) = mid;
  }
  return units::gain_db_from_r(r1 + hi);
}

DetectionLossTolerance detection_loss_tolerance(const ChainParams& p,
                                                double degradation_db) {
  p.validate();
  if (!(degradation_db > 0.0)) {
    throw std::invalid_argument("degradation threshold must be positive");
  }
  if (p.noise_floor == 0.0) {
    // Both n_minus and n_vac scale by eta_det, so the dB ratio is exactly
    // loss-invariant and no finite loss ever reaches the threshold.
    return {std::numeric_limits<double>::infinity(), true};
  }
  ChainParams q = p;
  q.eta_det = 1.0;
  const double base = simulate_chain(q).s_minus_db;
  const auto degradation = [&](double log10_eta) {
    q.eta_det = std::pow(10.0, log10_eta);
    return std::abs(simulate_chain(q).s_minus_db - base);
  };
  const double target = degradation_db;
  double lo = -15.0;  // eta_det = 1e-15, effectively total loss
  double hi = 0.0;
  if (degradation(lo) < target) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = (lo + hi) / 2.0;
    (degradation(mid) > target ? lo : hi) = mid;
  }
  return {-10.0 * hi, false};
}

std::vector<SqueezingResult> simulate_many_serial(const std::vector<ChainParams>& points) {
  std::vector<SqueezingResult> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = simulate_chain(points[i]);
  return out;
}

std::vector<SqueezingResult> simulate_many(const std::vector<ChainParams>& points,
                                           Exec exec) {
  if (exec == Exec::serial) return simulate_many_serial(points);
  std::vector<SqueezingResult> out(points.size());
  const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = simulate_chain(points[i]);
  return out;
}

}  // namespace sqz
