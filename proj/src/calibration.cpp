#include "sqz/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sqz/errors.hpp"
#include "sqz/units.hpp"

namespace sqz {

namespace {

constexpr double golden_ratio_conjugate = 0.6180339887498949;

// Bounded golden-section minimisation; assumes the scan that produced
// [lo, hi] bracketed the basin of the global minimum.
template <typename F>
double golden_minimise(F&& f, double lo, double hi, int iterations = 120) {
  double a = lo, b = hi;
  double x1 = b - golden_ratio_conjugate * (b - a);
  double x2 = a + golden_ratio_conjugate * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iterations; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - golden_ratio_conjugate * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + golden_ratio_conjugate * (b - a);
      f2 = f(x2);
    }
  }
  return (a + b) / 2.0;
}

// Coarse scan + golden refinement over [lo, hi].
template <typename F>
double scan_minimise(F&& f, double lo, double hi, int scan_points) {
  double best_x = lo;
  double best_f = f(lo);
  for (int i = 1; i < scan_points; ++i) {
    const double x = lo + (hi - lo) * i / (scan_points - 1);
    const double fx = f(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  const double step = (hi - lo) / (scan_points - 1);
  return golden_minimise(f, std::max(lo, best_x - step), std::min(hi, best_x + step));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent, well-separated generator stream per (seed, salt) pair.
std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t salt) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(salt)));
}

void apply_noise(std::vector<double>& power, double rin, std::uint64_t seed,
                 std::uint64_t salt) {
  if (rin == 0.0) return;
  auto eng = stream_for(seed, salt);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (double& v : power) {
    v = std::max(0.0, v * (1.0 + rin * unit(eng)));
  }
}

const ZeroSpanTrace* find_trace(const TraceSet& traces, TraceLabel label) {
  for (const auto& t : traces) {
    if (t.label == label) return &t;
  }
  return nullptr;
}

const ZeroSpanTrace& require_trace(const TraceSet& traces, TraceLabel label) {
  const ZeroSpanTrace* t = find_trace(traces, label);
  if (t == nullptr) {
    throw std::invalid_argument("missing trace: " + to_string(label));
  }
  t->validate();
  return *t;
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

std::string to_string(TraceLabel label) {
  switch (label) {
    case TraceLabel::squeezing_run: return "squeezing_run";
    case TraceLabel::shotnoise_original: return "shotnoise_original";
    case TraceLabel::shotnoise_max: return "shotnoise_max";
    case TraceLabel::shotnoise_min: return "shotnoise_min";
  }
  throw std::invalid_argument("unknown trace label");
}

TraceLabel trace_label_from_string(const std::string& name) {
  if (name == "squeezing_run") return TraceLabel::squeezing_run;
  if (name == "shotnoise_original") return TraceLabel::shotnoise_original;
  if (name == "shotnoise_max") return TraceLabel::shotnoise_max;
  if (name == "shotnoise_min") return TraceLabel::shotnoise_min;
  throw std::invalid_argument("unknown trace label: " + name);
}

void ZeroSpanTrace::validate() const {
  if (ramp_phase.size() != power.size()) {
    throw std::invalid_argument("trace vectors must have equal length");
  }
  if (ramp_phase.size() < 16) {
    throw std::invalid_argument("trace needs at least 16 samples");
  }
  for (double p : power) {
    if (!(p >= 0.0)) throw std::invalid_argument("trace powers must be >= 0");
  }
}

TraceSet synthesize_traces(const ChainParams& p, const std::vector<double>& ramp,
                           double rin, std::uint64_t seed, Exec exec) {
  p.validate();
  if (!(rin >= 0.0) || !std::isfinite(rin)) {
    throw std::invalid_argument("rin must be finite and >= 0");
  }
  if (ramp.size() < 16) throw std::invalid_argument("ramp needs at least 16 samples");
  double lo = ramp.front(), hi = ramp.front();
  for (double phi : ramp) {
    if (!std::isfinite(phi)) throw std::invalid_argument("ramp phases must be finite");
    lo = std::min(lo, phi);
    hi = std::max(hi, phi);
  }
  if (hi - lo < 2.0 * std::numbers::pi - 1e-12) {
    throw std::invalid_argument("ramp span must cover at least one full turn (2 pi)");
  }

  const double leak_amp = std::sqrt(p.pump_leak);
  const auto effective_r2 = [&](double phi) {
    // Leaked squeezer pump adds coherently to pump 2; r2 scales with the
    // effective pump amplitude |1 + sqrt(pump_leak) e^{i phi}|.
    return p.r2 * std::sqrt(1.0 + p.pump_leak + 2.0 * leak_amp * std::cos(phi));
  };

  ZeroSpanTrace run;
  run.label = TraceLabel::squeezing_run;
  run.rng_seed = seed;
  run.ramp_phase = ramp;
  run.power.resize(ramp.size());
  const auto n = static_cast<std::ptrdiff_t>(ramp.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ChainParams q = p;
      q.r2 = effective_r2(ramp[i]);
      run.power[i] = detected_photons(q, ramp[i], true);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      ChainParams q = p;
      q.r2 = effective_r2(ramp[i]);
      run.power[i] = detected_photons(q, ramp[i], true);
    }
  }

  const auto flat_trace = [&](TraceLabel label, double r2_eff) {
    ZeroSpanTrace t;
    t.label = label;
    t.rng_seed = seed;
    t.ramp_phase = ramp;
    ChainParams q = p;
    q.r2 = r2_eff;
    t.power.assign(ramp.size(), detected_photons(q, 0.0, false));
    return t;
  };
  ZeroSpanTrace original = flat_trace(TraceLabel::shotnoise_original, p.r2);
  ZeroSpanTrace maximum = flat_trace(TraceLabel::shotnoise_max, p.r2 * (1.0 + leak_amp));
  ZeroSpanTrace minimum = flat_trace(TraceLabel::shotnoise_min, p.r2 * (1.0 - leak_amp));

  // Noise is drawn serially per trace from label-salted streams, so the
  // result is independent of the execution policy above.
  apply_noise(run.power, rin, seed, 1);
  apply_noise(original.power, rin, seed, 2);
  apply_noise(maximum.power, rin, seed, 3);
  apply_noise(minimum.power, rin, seed, 4);

  return {std::move(run), std::move(original), std::move(maximum), std::move(minimum)};
}

SqueezingResult extract_squeezing(const TraceSet& traces, int smoothing_window) {
  if (smoothing_window < 1 || smoothing_window % 2 == 0) {
    throw std::invalid_argument("smoothing window must be odd and >= 1");
  }
  const ZeroSpanTrace& run = require_trace(traces, TraceLabel::squeezing_run);
  const ZeroSpanTrace& tmax = require_trace(traces, TraceLabel::shotnoise_max);
  const ZeroSpanTrace& tmin = require_trace(traces, TraceLabel::shotnoise_min);
  const ZeroSpanTrace* original = find_trace(traces, TraceLabel::shotnoise_original);

  std::vector<double> smoothed = run.power;
  if (smoothing_window > 1) {
    const int half = smoothing_window / 2;
    const int n = static_cast<int>(run.power.size());
    for (int i = 0; i < n; ++i) {
      const int a = std::max(0, i - half);
      const int b = std::min(n - 1, i + half);
      double sum = 0.0;
      for (int j = a; j <= b; ++j) sum += run.power[j];
      smoothed[i] = sum / (b - a + 1);
    }
  }

  const double run_min = *std::min_element(smoothed.begin(), smoothed.end());
  const double run_max = *std::max_element(smoothed.begin(), smoothed.end());
  const double level_max = mean(tmax.power);
  const double level_min = mean(tmin.power);
  if (!(run_min > 0.0) || !(level_max > 0.0) || !(level_min > 0.0)) {
    throw std::invalid_argument("nonpositive powers; cannot form dB ratios");
  }

  SqueezingResult out;
  out.s_minus_db = units::db_from_ratio(run_min / level_min);
  out.s_plus_db = units::db_from_ratio(run_max / level_max);
  // Photon numbers rescaled to the unmodulated shot-noise reference: this is
  // what the max/min calibration corrects for, and it keeps
  // s_+- = 10 log10(n_+- / n_vac) exact.
  double reference = 1.0;
  if (original != nullptr) {
    original->validate();
    reference = mean(original->power);
    if (!(reference > 0.0)) {
      throw std::invalid_argument("nonpositive powers; cannot form dB ratios");
    }
  }
  out.n_vac = reference;
  out.n_minus = reference * run_min / level_min;
  out.n_plus = reference * run_max / level_max;
  return out;
}

LossFitResult fit_loss_model(const std::vector<LossPoint>& data) {
  if (data.empty()) throw std::invalid_argument("loss fit needs at least one point");
  double magnitude = 0.0;
  for (const auto& d : data) {
    if (!std::isfinite(d.s_plus_db) || !std::isfinite(d.s_minus_db)) {
      throw std::invalid_argument("loss-fit data must be finite");
    }
    magnitude = std::max({magnitude, std::abs(d.s_plus_db), std::abs(d.s_minus_db)});
  }
  LossFitResult out;
  if (magnitude < 1e-12) {
    out.underdetermined = true;
    out.eta_hat = std::numeric_limits<double>::quiet_NaN();
    out.r_hat.assign(data.size(), 0.0);
    return out;
  }

  const auto model = [](double eta, double r) {
    return LossPoint{units::db_from_ratio((1.0 - eta) + eta * std::exp(2.0 * r)),
                     units::db_from_ratio((1.0 - eta) + eta * std::exp(-2.0 * r))};
  };

  // Inner solve: best squeeze parameter for one point at fixed eta.
  const auto best_r = [&](double eta, const LossPoint& d) {
    const double implied = (units::ratio_from_db(std::max(d.s_plus_db, 0.0)) + 1.0) /
                           std::max(eta, 1e-9);
    const double r_cap = 0.5 * std::log(implied) + 2.0;
    const auto sse = [&](double r) {
      const LossPoint m = model(eta, r);
      const double ep = m.s_plus_db - d.s_plus_db;
      const double em = m.s_minus_db - d.s_minus_db;
      return ep * ep + em * em;
    };
    return scan_minimise(sse, 0.0, r_cap, 193);
  };

  const auto total_sse = [&](double eta) {
    double sum = 0.0;
    for (const auto& d : data) {
      if (eta <= 0.0) {
        sum += d.s_plus_db * d.s_plus_db + d.s_minus_db * d.s_minus_db;
        continue;
      }
      const double r = best_r(eta, d);
      const LossPoint m = model(eta, r);
      const double ep = m.s_plus_db - d.s_plus_db;
      const double em = m.s_minus_db - d.s_minus_db;
      sum += ep * ep + em * em;
    }
    return sum;
  };

  out.eta_hat = scan_minimise(total_sse, 0.0, 1.0, 257);
  out.r_hat.resize(data.size());
  double sse = 0.0;
  double r_max = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.r_hat[i] = out.eta_hat > 0.0 ? best_r(out.eta_hat, data[i]) : 0.0;
    const LossPoint m = model(out.eta_hat, out.r_hat[i]);
    const double ep = m.s_plus_db - data[i].s_plus_db;
    const double em = m.s_minus_db - data[i].s_minus_db;
    sse += ep * ep + em * em;
    r_max = std::max(r_max, out.r_hat[i]);
  }
  out.residual_db = std::sqrt(sse / (2.0 * static_cast<double>(data.size())));
  out.inferred_squeezing_db = units::gain_db_from_r(r_max);
  return out;
}

GainFitResult fit_gain_curve(const std::vector<GainPoint>& data) {
  if (data.size() < 2) throw std::invalid_argument("gain fit needs at least two points");
  double e_min = std::numeric_limits<double>::infinity();
  double e_max = 0.0;
  double n_min = std::numeric_limits<double>::infinity();
  double n_max = 0.0;
  for (const auto& d : data) {
    if (!(d.energy_pj > 0.0)) {
      throw std::invalid_argument("pump energies must be positive");
    }
    if (!(d.photons > 0.0)) {
      throw std::invalid_argument("photon numbers must be positive");
    }
    e_min = std::min(e_min, d.energy_pj);
    e_max = std::max(e_max, d.energy_pj);
    n_min = std::min(n_min, d.photons);
    n_max = std::max(n_max, d.photons);
  }

  // For fixed g the optimal eta in relative least squares is closed-form:
  // with a_i = sinh^2(g sqrt(E_i)) / N_i, minimise sum (eta a_i - 1)^2.
  const auto eta_for = [&](double g) {
    double num = 0.0, den = 0.0;
    for (const auto& d : data) {
      const double s = std::sinh(g * std::sqrt(d.energy_pj));
      const double a = s * s / d.photons;
      num += a;
      den += a * a;
    }
    if (den <= 0.0) return 1.0;
    return std::clamp(num / den, 1e-12, 1.0);
  };
  const auto sse = [&](double log_g) {
    const double g = std::exp(log_g);
    const double eta = eta_for(g);
    double sum = 0.0;
    for (const auto& d : data) {
      const double s = std::sinh(g * std::sqrt(d.energy_pj));
      const double rel = eta * s * s / d.photons - 1.0;
      sum += rel * rel;
    }
    return sum;
  };

  const double g_lo = 0.1 * std::asinh(std::sqrt(n_min)) / std::sqrt(e_max);
  const double g_hi = std::asinh(std::sqrt(n_max * 1e8)) / std::sqrt(e_min);
  const double best_log_g = scan_minimise(sse, std::log(g_lo), std::log(g_hi), 801);

  GainFitResult out;
  out.g_hat = std::exp(best_log_g);
  out.eta_overall_hat = eta_for(out.g_hat);
  out.residual = std::sqrt(sse(best_log_g) / static_cast<double>(data.size()));
  return out;
}

double gain_from_antisqueezing(double s_plus_db, double eta) {
  if (!(s_plus_db >= 0.0)) {
    throw std::invalid_argument("anti-squeezing must be >= 0 dB");
  }
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("eta must lie in (0, 1]");
  }
  const double e2r = (units::ratio_from_db(s_plus_db) - (1.0 - eta)) / eta;
  return units::db_from_ratio(e2r);
}

std::vector<SqueezingResult> extraction_spread(const ChainParams& p,
                                               const std::vector<double>& ramp,
                                               double rin, std::uint64_t seed0,
                                               int n_seeds, Exec exec) {
  if (n_seeds <= 0) throw std::invalid_argument("seed count must be positive");
  std::vector<SqueezingResult> out(static_cast<std::size_t>(n_seeds));
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_seeds; ++i) {
      // Per-seed work is self-contained; inner synthesis stays serial to
      // avoid nested parallel regions.
      out[i] = extract_squeezing(
          synthesize_traces(p, ramp, rin, seed0 + static_cast<std::uint64_t>(i),
                            Exec::serial));
    }
  } else {
    for (int i = 0; i < n_seeds; ++i) {
      out[i] = extract_squeezing(
          synthesize_traces(p, ramp, rin, seed0 + static_cast<std::uint64_t>(i),
                            Exec::serial));
    }
  }
  return out;
}

void write_trace_csv(const std::string& path, const ZeroSpanTrace& trace) {
  trace.validate();
  std::ofstream file(path);
  if (!file) throw io_error("cannot open for writing: " + path);
  file << "# label=" << to_string(trace.label) << " seed=" << trace.rng_seed << "\n";
  file << "ramp_phase_rad,power_photons\n";
  char buf[128];
  for (std::size_t i = 0; i < trace.ramp_phase.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", trace.ramp_phase[i], trace.power[i]);
    file << buf;
  }
  if (!file.good()) throw io_error("write failed: " + path);
}

ZeroSpanTrace read_trace_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw io_error("cannot open for reading: " + path);
  ZeroSpanTrace trace;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string token;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "label") trace.label = trace_label_from_string(value);
        if (key == "seed") trace.rng_seed = std::stoull(value);
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column-name row
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw config_error(path + ":" + std::to_string(line_no) + ": expected two columns");
    }
    try {
      trace.ramp_phase.push_back(std::stod(line.substr(0, comma)));
      trace.power.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw config_error(path + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  trace.validate();
  return trace;
}

}  // namespace sqz
