// Release gate: nine checks with pinned tolerances covering the finite-gain
// readout formula, measurement-gain sufficiency, the loss law and its fit,
// photon-number anchors, noise-floor behaviour, the gain-curve fit, the
// calibration round trip, the spectral model, and the Gaussian-core
// invariants.  Each check prints exactly one PASS:/FAIL: line with the
// measured values; the exit code is the number of failed checks.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sqz/calibration.hpp"
#include "sqz/chain.hpp"
#include "sqz/commands.hpp"
#include "sqz/config.hpp"
#include "sqz/exec.hpp"
#include "sqz/gaussian.hpp"
#include "sqz/spectral.hpp"
#include "sqz/units.hpp"

using namespace sqz;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

ChainParams lossless_chain(double r1_db, double r2_db) {
  ChainParams p;
  p.r1 = units::r_from_gain_db(r1_db);
  p.r2 = units::r_from_gain_db(r2_db);
  p.eta_coupler = 1.0;
  p.eta_det = 1.0;
  p.pump_leak = 0.0;
  p.sigma_phase = 0.0;
  p.noise_floor = 0.0;
  return p;
}

std::vector<double> phase_ramp(int n) {
  // Spans exactly one full turn.  The power minimum falls between samples,
  // which costs well under 1e-3 dB at this sample count.
  std::vector<double> ramp(n);
  for (int i = 0; i < n; ++i) {
    ramp[i] = 2.0 * std::numbers::pi * i / (n - 1);
  }
  return ramp;
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

double summary_value(const std::string& text, const std::string& key) {
  const auto at = text.find(key);
  if (at == std::string::npos) return std::nan("");
  return std::strtod(text.c_str() + at + key.size(), nullptr);
}

GaussianState with_vacuum_ancilla(const GaussianState& s) {
  const int d = 2 * s.n_modes();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(d + 2, d + 2);
  cov.topLeftCorner(d, d) = s.cov();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d + 2);
  mean.head(d) = s.mean();
  return GaussianState(mean, cov);
}

// 1. Readout formula: the (10 dB, 50 dB) point hits (-10.00, +10.00) within
// 0.02 dB, and the closed form matches the exact Gaussian simulation to
// 1e-9 dB across the whole gain grid.  Budget: 1 s.
bool criterion_readout_formula(std::string& detail) {
  const auto t0 = Clock::now();
  const IdealSqueezing head =
      ideal_squeezing(units::r_from_gain_db(10.0), units::r_from_gain_db(50.0));
  bool ok = std::abs(head.s_minus_db + 10.0) <= 0.02 &&
            std::abs(head.s_plus_db - 10.0) <= 0.02;
  double worst = 0.0;
  for (int r1_db = 1; r1_db <= 15; ++r1_db) {
    for (int r2_db = 20; r2_db <= 60; ++r2_db) {
      const ChainParams p = lossless_chain(r1_db, r2_db);
      const SqueezingResult sim = simulate_chain(p);
      const IdealSqueezing formula = ideal_squeezing(p.r1, p.r2);
      worst = std::max(worst, std::abs(sim.s_minus_db - formula.s_minus_db));
      worst = std::max(worst, std::abs(sim.s_plus_db - formula.s_plus_db));
    }
  }
  ok = ok && worst <= 1e-9;
  const double secs = seconds_since(t0);
  ok = ok && secs < 1.0;
  detail = format("(10 dB, 50 dB) -> (%.4f, %+.4f) dB, grid max |sim - formula| = %.2e dB, %.2f s",
                  head.s_minus_db, head.s_plus_db, worst, secs);
  return ok;
}

// 2. Measurement-gain sufficiency: 0.1 dB readout accuracy for an 11 dB
// squeezer needs at most 33 dB of measurement gain.  Budget: 1 s.
bool criterion_gain_sufficiency(std::string& detail) {
  const auto t0 = Clock::now();
  const double gain_db = required_measurement_gain(units::r_from_gain_db(11.0), 0.1);
  const double secs = seconds_since(t0);
  const bool ok = gain_db <= 33.0 && secs < 1.0;
  detail = format("required gain %.2f dB (limit 33 dB), %.2f s", gain_db, secs);
  return ok;
}

// 3. Loss law: the high-gain limit at (10.6 dB, eta = 0.7) and the loss-model
// fit on noiseless synthetic points.
bool criterion_loss_law(std::string& detail) {
  const LossySqueezing lim = lossy_squeezing_limit(units::r_from_gain_db(10.6), 0.7);
  bool ok = std::abs(lim.s_minus_db + 4.43) <= 0.02 &&
            std::abs(lim.s_plus_db - 9.21) <= 0.02;
  std::vector<LossPoint> points;
  for (const double gain_db : {4.0, 6.0, 8.0, 10.6}) {
    const LossySqueezing v = lossy_squeezing_limit(units::r_from_gain_db(gain_db), 0.7);
    LossPoint q;
    q.s_plus_db = v.s_plus_db;
    q.s_minus_db = v.s_minus_db;
    points.push_back(q);
  }
  const LossFitResult fit = fit_loss_model(points);
  ok = ok && !fit.underdetermined && std::abs(fit.eta_hat - 0.7) <= 0.001 &&
       std::abs(fit.inferred_squeezing_db - 10.6) <= 0.05;
  detail = format("limit (%.3f, %+.3f) dB, fit eta %.4f, inferred %.3f dB",
                  lim.s_minus_db, lim.s_plus_db, fit.eta_hat, fit.inferred_squeezing_db);
  return ok;
}

// 4. Photon anchors: 10 dB squeezed vacuum carries about two photons; the
// lossless (10 dB, 50 dB) chain reads out n_plus of order 1e5 and n_minus of
// order 1e3 with their ratio within a factor of 3 of 100.
bool criterion_photon_anchors(std::string& detail) {
  const GaussianState sq =
      squeeze(GaussianState::vacuum(1), 0, units::r_from_gain_db(10.0), 0.0);
  const double n10 = total_mean_photon(sq);
  bool ok = std::abs(n10 - 2.03) <= 0.01;
  const SqueezingResult res = simulate_chain(lossless_chain(10.0, 50.0));
  ok = ok && res.n_plus >= std::pow(10.0, 4.5) && res.n_plus <= std::pow(10.0, 5.5);
  ok = ok && res.n_minus >= std::pow(10.0, 2.5) && res.n_minus <= std::pow(10.0, 3.5);
  const double ratio = res.n_plus / res.n_minus;
  ok = ok && ratio >= 100.0 / 3.0 && ratio <= 300.0;
  detail = format("<N>(10 dB) = %.4f, n_plus = %.3e, n_minus = %.3e, ratio = %.1f",
                  n10, res.n_plus, res.n_minus, ratio);
  return ok;
}

// 5. Detection-loss behaviour: with a zero noise floor the readout levels are
// loss-invariant to 1e-12 dB; with a positive floor the tolerable loss is
// finite, shrinks as the floor grows, and sits near 7 dB at the default
// operating point.
bool criterion_loss_invariance(std::string& detail) {
  ChainParams base;
  base.noise_floor = 0.0;
  const SqueezingResult ref = simulate_chain(base);
  double worst = 0.0;
  for (const double eta_det : {0.9, 0.5, 0.2, 0.05}) {
    ChainParams p = base;
    p.eta_det = eta_det;
    const SqueezingResult res = simulate_chain(p);
    worst = std::max(worst, std::abs(res.s_minus_db - ref.s_minus_db));
    worst = std::max(worst, std::abs(res.s_plus_db - ref.s_plus_db));
  }
  bool ok = worst <= 1e-12;
  double previous = std::numeric_limits<double>::infinity();
  bool monotone = true;
  for (const double floor : {1.0, 3.0, 10.0, 30.0, 100.0}) {
    ChainParams p;
    p.noise_floor = floor;
    const DetectionLossTolerance t = detection_loss_tolerance(p, 0.1);
    monotone = monotone && !t.unbounded && std::isfinite(t.loss_db) &&
               t.loss_db < previous;
    previous = t.loss_db;
  }
  ok = ok && monotone;
  // Order-of-magnitude agreement with the ~7 dB loss tolerance of the
  // measured system: within half a decade, i.e. [2.2, 22.1] dB.
  const DetectionLossTolerance at_default = detection_loss_tolerance(ChainParams{}, 0.1);
  ok = ok && at_default.loss_db >= 7.0 / std::sqrt(10.0) &&
       at_default.loss_db <= 7.0 * std::sqrt(10.0);
  detail = format("max |shift| = %.2e dB at zero floor, tolerance %.2f dB at the default floor%s",
                  worst, at_default.loss_db, monotone ? "" : ", not monotone");
  return ok;
}

// 6. Gain-curve fit: (g, eta) = (1.4, 0.20) recovered within 5% relative from
// 1%-noisy photon counts for every one of 100 seeds, and sinh^2 r stays inside
// the G/4 (1 +- 2 e^{-2r}) band at and above 30 dB.
bool criterion_gain_fit(std::string& detail) {
  const double g = 1.4, eta = 0.20;
  double worst_rel = 0.0;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<GainPoint> data;
    for (int i = 1; i <= 12; ++i) {
      const double e = 0.05 * std::pow(3.0 / 0.05, (i - 1) / 11.0);
      const double n = eta * std::sinh(g * std::sqrt(e)) * std::sinh(g * std::sqrt(e));
      data.push_back({e, n * (1 + noise(rng))});
    }
    const GainFitResult fit = fit_gain_curve(data);
    const double rel = std::max(std::abs(fit.g_hat - g) / g,
                                std::abs(fit.eta_overall_hat - eta) / eta);
    worst_rel = std::max(worst_rel, rel);
    ok = ok && rel < 0.05;
  }
  bool in_band = true;
  for (double gain_db = 30.0; gain_db <= 60.0; gain_db += 5.0) {
    const double r = units::r_from_gain_db(gain_db);
    const double quarter_gain = std::exp(2 * r) / 4;
    const double n = std::sinh(r) * std::sinh(r);
    in_band = in_band && n >= quarter_gain * (1 - 2 * std::exp(-2 * r)) &&
              n <= quarter_gain * (1 + 2 * std::exp(-2 * r));
  }
  ok = ok && in_band;
  detail = format("worst relative error %.2f%% over 100 seeds, G/4 band %s",
                  100 * worst_rel, in_band ? "held 30-60 dB" : "violated");
  return ok;
}

// 7. Calibration round trip: synthesize -> extract returns the simulated
// ground truth within 0.05 dB without noise and within 0.2 dB at 1% relative
// intensity noise over 100 seeds of 1e4-sample traces.  Budget: 10 s.
bool criterion_round_trip(std::string& detail) {
  const auto t0 = Clock::now();
  ChainParams p;
  p.r2 = units::r_from_gain_db(60.0);
  p.noise_floor = 0.0;
  const SqueezingResult truth = simulate_chain(p);
  const std::vector<double> ramp = phase_ramp(10000);

  const SqueezingResult clean = extract_squeezing(synthesize_traces(p, ramp, 0.0, 7));
  const double clean_err = std::max(std::abs(clean.s_minus_db - truth.s_minus_db),
                                    std::abs(clean.s_plus_db - truth.s_plus_db));
  bool ok = clean_err <= 0.05;

  double noisy_err = 0.0;
  for (const SqueezingResult& res : extraction_spread(p, ramp, 0.01, 1, 100)) {
    noisy_err = std::max(noisy_err, std::abs(res.s_minus_db - truth.s_minus_db));
    noisy_err = std::max(noisy_err, std::abs(res.s_plus_db - truth.s_plus_db));
  }
  ok = ok && noisy_err <= 0.2;
  const double secs = seconds_since(t0);
  ok = ok && secs < 10.0;
  detail = format("noiseless |err| = %.2e dB, noisy max |err| = %.3f dB over 100 seeds, %.2f s",
                  clean_err, noisy_err, secs);
  return ok;
}

// 8. Spectral model: squeezing at the three calibration wavelengths, the
// measured bandwidth, and the pulse-duration estimate in optical cycles.
bool criterion_spectrum(std::string& detail) {
  RunConfig config = RunConfig::defaults();
  config.out_dir.clear();
  std::ostringstream out;
  cmd_spectrum(config, out);
  const std::string text = out.str();
  const auto rows = csv_rows(text);
  auto s_minus_near = [&rows](double wavelength_nm) {
    double best = 1e18, value = 0.0;
    for (const auto& row : rows) {
      const double d = std::abs(row[1] - wavelength_nm);
      if (d < best) {
        best = d;
        value = row[2];
      }
    }
    return value;
  };
  const double a1950 = s_minus_near(1950.0);
  const double a2090 = s_minus_near(2090.0);
  const double a2200 = s_minus_near(2200.0);
  bool ok = std::abs(a1950 + 3.8) <= 0.1 && std::abs(a2090 + 4.2) <= 0.1 &&
            std::abs(a2200 + 4.9) <= 0.1;
  const double bw_thz = summary_value(text, "# bandwidth_thz=");
  ok = ok && bw_thz >= 25.1 * 0.9 && bw_thz <= 25.1 * 1.1;
  const double cycles_fit = summary_value(text, "# temporal_cycles_gaussian_fit=");
  const double cycles_numeric = summary_value(text, "# temporal_cycles_transform_limit=");
  ok = ok && cycles_fit >= 2.0 && cycles_fit <= 8.0 && cycles_numeric >= 2.0 &&
       cycles_numeric <= 8.0;
  detail = format("anchors (%.2f, %.2f, %.2f) dB, bandwidth %.2f THz, cycles %.2f / %.2f",
                  a1950, a2090, a2200, bw_thz, cycles_fit, cycles_numeric);
  return ok;
}

// 9. Gaussian invariants over 1000 random op sequences of length <= 20:
// composed transforms stay symplectic, states respect the uncertainty bound,
// lossless sequences stay pure, loss scales per-mode photon numbers linearly,
// and the loss channel equals a beamsplitter against vacuum plus trace-out.
// Thresholds are scaled by the matrix norms where rounding grows with the
// accumulated gain.  Budget: 30 s.
bool criterion_invariants(std::string& detail) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(0x5eed2026ULL);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_defect = 0.0, worst_uncertainty = 0.0, worst_purity = 0.0;
  double worst_linearity = 0.0, worst_equivalence = 0.0;
  bool ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const int modes = 1 + static_cast<int>(u(rng) * 2.999);
    GaussianState s = GaussianState::vacuum(modes);
    SymplecticTransform total = SymplecticTransform::identity(modes);
    bool lossless = true;
    double squeeze_budget = 4.0;  // keeps the condition number manageable
    const int n_ops = 1 + static_cast<int>(u(rng) * 19.999);
    for (int op = 0; op < n_ops; ++op) {
      const int kind = static_cast<int>(u(rng) * 3.999);
      if (kind == 0 && squeeze_budget > 0.0) {
        const double r = (2 * u(rng) - 1) * std::min(0.8, squeeze_budget);
        squeeze_budget -= std::abs(r);
        const int m = static_cast<int>(u(rng) * modes);
        const double phi = 2 * std::numbers::pi * u(rng);
        s = squeeze(s, m, r, phi);
        total = compose(SymplecticTransform::squeezer(modes, m, r, phi), total);
      } else if (kind == 1 || (kind == 2 && modes < 2)) {
        const int m = static_cast<int>(u(rng) * modes);
        const double theta = 2 * std::numbers::pi * u(rng);
        s = rotate(s, m, theta);
        total = compose(SymplecticTransform::rotation(modes, m, theta), total);
      } else if (kind == 2) {
        const int a = static_cast<int>(u(rng) * modes);
        const int b = (a + 1 + static_cast<int>(u(rng) * (modes - 1))) % modes;
        const double t = 0.05 + 0.9 * u(rng);
        s = beamsplitter(s, a, b, t);
        total = compose(SymplecticTransform::beamsplitter(modes, a, b, t), total);
      } else {
        const int m = static_cast<int>(u(rng) * modes);
        const double eta = 0.05 + 0.95 * u(rng);
        const double before = mean_photon(s, m);
        s = loss_channel(s, m, eta);
        const double after = mean_photon(s, m);
        lossless = false;
        const double dev =
            std::abs(after - eta * before) / std::max(1.0, std::abs(before));
        worst_linearity = std::max(worst_linearity, dev);
        ok = ok && dev <= 1e-9;
      }
    }
    const double scale = std::max(1.0, total.matrix.squaredNorm());
    const double defect = symplectic_defect(total.matrix) / scale;
    worst_defect = std::max(worst_defect, defect);
    ok = ok && defect <= 1e-12;
    const double cov_scale = std::max(1.0, s.cov().norm());
    const double uncertainty = min_uncertainty_eigenvalue(s) / cov_scale;
    worst_uncertainty = std::max(worst_uncertainty, -uncertainty);
    ok = ok && uncertainty >= -1e-12;
    if (lossless) {
      const double purity_dev = std::abs(purity_determinant(s) - 1.0);
      worst_purity = std::max(worst_purity, purity_dev);
      ok = ok && purity_dev <= 1e-6;
    }
    // Loss channel vs beamsplitter against a vacuum ancilla on the final state.
    const int m = static_cast<int>(u(rng) * modes);
    const double eta = 0.05 + 0.95 * u(rng);
    const GaussianState direct = loss_channel(s, m, eta);
    std::vector<int> keep(modes);
    for (int i = 0; i < modes; ++i) keep[i] = i;
    const GaussianState reduced =
        reduce(beamsplitter(with_vacuum_ancilla(s), m, modes, eta), keep);
    const double equiv = (direct.cov() - reduced.cov()).norm() / cov_scale;
    worst_equivalence = std::max(worst_equivalence, equiv);
    ok = ok && equiv <= 1e-12;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  detail = format(
      "worst: defect %.1e, uncertainty %.1e, purity %.1e, linearity %.1e, equivalence %.1e, %.2f s",
      worst_defect, worst_uncertainty, worst_purity, worst_linearity,
      worst_equivalence, secs);
  return ok;
}

struct Criterion {
  const char* name;
  bool (*run)(std::string&);
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"readout formula vs exact simulation", criterion_readout_formula},
      {"measurement-gain sufficiency", criterion_gain_sufficiency},
      {"loss law and loss-model fit", criterion_loss_law},
      {"photon-number anchors", criterion_photon_anchors},
      {"detection-loss invariance and tolerance", criterion_loss_invariance},
      {"gain-curve fit and G/4 band", criterion_gain_fit},
      {"calibration round trip", criterion_round_trip},
      {"spectral anchors, bandwidth, pulse cycles", criterion_spectrum},
      {"Gaussian invariant suite", criterion_invariants},
  };
  int failures = 0;
  int index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << ": " << index << ". " << c.name << " — "
              << detail << "\n";
  }
  std::cout << (failures == 0 ? "all criteria passed" : "criteria failed") << " ("
            << (9 - failures) << "/9)" << std::endl;
  return failures;
}
