#include "sqz/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "sqz/errors.hpp"
#include "sqz/units.hpp"

namespace sqz {

namespace {

using nlohmann::json;

// Squeezing anchors (wavelength, measured level) used to derive the default
// coupler table.
constexpr double anchor_wavelength_m[3] = {1.950e-6, 2.090e-6, 2.200e-6};
constexpr double anchor_s_minus_db[3] = {-3.8, -4.2, -4.9};

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& item : obj.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw config_error("unknown key: " + where + "." + item.key());
    }
  }
}

double get_number(const json& obj, const char* key, double fallback,
                  const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw config_error(where + "." + key + ": expected a number");
  }
  return v.get<double>();
}

int get_integer(const json& obj, const char* key, int fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    throw config_error(where + "." + key + ": expected an integer");
  }
  return v.get<int>();
}

std::uint64_t get_seed(const json& obj, const char* key, std::uint64_t fallback,
                       const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    throw config_error(where + "." + key + ": expected an integer seed");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback,
                       const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw config_error(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

ChainParams parse_chain(const json& obj, const ChainParams& fallback) {
  check_keys(obj,
             {"r1", "r2", "phi_pump2", "eta_coupler", "eta_det", "pump_leak",
              "sigma_phase", "noise_floor"},
             "chain");
  ChainParams p = fallback;
  p.r1 = get_number(obj, "r1", p.r1, "chain");
  p.r2 = get_number(obj, "r2", p.r2, "chain");
  p.phi_pump2 = get_number(obj, "phi_pump2", p.phi_pump2, "chain");
  p.eta_coupler = get_number(obj, "eta_coupler", p.eta_coupler, "chain");
  p.eta_det = get_number(obj, "eta_det", p.eta_det, "chain");
  p.pump_leak = get_number(obj, "pump_leak", p.pump_leak, "chain");
  p.sigma_phase = get_number(obj, "sigma_phase", p.sigma_phase, "chain");
  p.noise_floor = get_number(obj, "noise_floor", p.noise_floor, "chain");
  return p;
}

DispersionSpec parse_dispersion(const json& obj, const std::string& where) {
  check_keys(obj, {"delta_k0_per_m", "beta2_s2_per_m", "beta4_s4_per_m", "length_mm"},
             where);
  DispersionSpec d;
  d.delta_k0 = get_number(obj, "delta_k0_per_m", 0.0, where);
  d.beta2 = get_number(obj, "beta2_s2_per_m", 0.0, where);
  d.beta4 = get_number(obj, "beta4_s4_per_m", 0.0, where);
  d.length = get_number(obj, "length_mm", 0.0, where) / 1e3;
  return d;
}

CouplerSpectrum parse_coupler(const json& obj, const std::string& where) {
  check_keys(obj, {"wavelength_nm", "eta"}, where);
  if (!obj.contains("wavelength_nm") || !obj.contains("eta")) {
    throw config_error(where + ": needs both wavelength_nm and eta arrays");
  }
  const json& wl = obj.at("wavelength_nm");
  const json& eta = obj.at("eta");
  if (!wl.is_array() || !eta.is_array() || wl.size() != eta.size() || wl.empty()) {
    throw config_error(where + ": wavelength_nm and eta must be equal-length arrays");
  }
  CouplerSpectrum c;
  for (std::size_t i = 0; i < wl.size(); ++i) {
    if (!wl[i].is_number() || !eta[i].is_number()) {
      throw config_error(where + ": table entries must be numbers");
    }
    c.wavelength_m.push_back(wl[i].get<double>() / 1e9);
    c.eta.push_back(eta[i].get<double>());
  }
  return c;
}

SweepRange parse_range(const json& obj, const SweepRange& fallback,
                       const std::string& where) {
  check_keys(obj, {"start", "stop", "points"}, where);
  SweepRange r = fallback;
  r.start = get_number(obj, "start", r.start, where);
  r.stop = get_number(obj, "stop", r.stop, where);
  r.points = get_integer(obj, "points", r.points, where);
  return r;
}

json dispersion_json(const DispersionSpec& d) {
  return json{{"delta_k0_per_m", d.delta_k0},
              {"beta2_s2_per_m", d.beta2},
              {"beta4_s4_per_m", d.beta4},
              {"length_mm", d.length * 1e3}};
}

}  // namespace

SpectralGrid SpectralSettings::grid() const {
  return SpectralGrid::uniform(center_wavelength_m, span_hz, bins);
}

SpectralModelParams SpectralSettings::model_params() const {
  SpectralModelParams p;
  p.r1_peak = r1_peak;
  p.r2_peak = r2_peak;
  p.squeezer_dispersion = squeezer_dispersion;
  p.measurement_dispersion = measurement_dispersion;
  p.coupler = coupler;
  p.noise_floor = noise_floor;
  p.sigma_phase = sigma_phase;
  return p;
}

const std::map<std::string, SweepRange>& default_sweeps() {
  static const std::map<std::string, SweepRange> ranges = {
      {"pump_energy", {0.05, 3.0, 60}},      // pJ
      {"coupler_eta", {0.0, 1.0, 21}},
      {"detection_loss", {0.0, 30.0, 31}},   // dB
      {"measurement_gain", {10.0, 60.0, 26}},// dB
      {"sigma_phase", {0.0, 0.5, 26}},       // rad
  };
  return ranges;
}

CouplerSpectrum calibrated_coupler_table(const SpectralSettings& base) {
  const double f_center = units::speed_of_light / base.center_wavelength_m;
  CouplerSpectrum table;
  for (int k = 0; k < 3; ++k) {
    const double omega =
        2.0 * std::numbers::pi * (units::speed_of_light / anchor_wavelength_m[k] - f_center);
    ChainParams p;
    p.r1 = gain_at(base.squeezer_dispersion, base.r1_peak, omega);
    p.r2 = gain_at(base.measurement_dispersion, base.r2_peak, omega);
    p.phi_pump2 = 0.0;
    p.eta_det = 1.0;
    p.pump_leak = 0.0;
    p.sigma_phase = base.sigma_phase;
    p.noise_floor = base.noise_floor;
    // s_minus is strictly decreasing in the coupler transmissivity, so the
    // anchor level pins eta by bisection.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = (lo + hi) / 2.0;
      p.eta_coupler = mid;
      (simulate_chain(p).s_minus_db > anchor_s_minus_db[k] ? lo : hi) = mid;
    }
    table.wavelength_m.push_back(anchor_wavelength_m[k]);
    table.eta.push_back((lo + hi) / 2.0);
  }
  table.validate();
  return table;
}

RunConfig RunConfig::defaults() {
  RunConfig c;
  c.seed = 42;
  c.out_dir = "";
  c.chain = ChainParams{};
  c.nonlinear_strength = 1.4;
  c.sweeps = default_sweeps();
  c.traces = TraceSettings{};

  SpectralSettings s;
  s.center_wavelength_m = 2.090e-6;
  s.span_hz = 80e12;
  s.bins = 1001;
  s.r1_peak = units::r_from_gain_db(10.6);
  s.r2_peak = units::r_from_gain_db(45.0);
  s.squeezer_dispersion = DispersionSpec::for_half_power_width(36.4e12, 2.5e-3);
  // Same waveguide dispersion, twice the poled length for the measurement OPA.
  s.measurement_dispersion = s.squeezer_dispersion;
  s.measurement_dispersion.length = 5.0e-3;
  s.noise_floor = 400.0;
  s.sigma_phase = 0.0;
  s.threshold_db = 3.0;
  s.coupler = calibrated_coupler_table(s);
  c.spectral = s;
  return c;
}

void RunConfig::validate() const {
  try {
    chain.validate();
  } catch (const std::exception& e) {
    throw config_error(std::string("chain: ") + e.what());
  }
  if (!(nonlinear_strength > 0.0)) {
    throw config_error("nonlinear_strength_per_sqrt_pj must be positive");
  }
  for (const auto& [axis, range] : sweeps) {
    if (default_sweeps().find(axis) == default_sweeps().end()) {
      throw config_error("unknown sweep axis: " + axis);
    }
    const std::string where = "sweeps." + axis;
    if (range.points < 1) throw config_error(where + ": points must be >= 1");
    if (!std::isfinite(range.start) || !std::isfinite(range.stop) ||
        range.start > range.stop) {
      throw config_error(where + ": needs finite start <= stop");
    }
    if (axis != "pump_energy" && range.start < 0.0) {
      throw config_error(where + ": start must be >= 0");
    }
    if (axis == "pump_energy" && range.start < 0.0) {
      throw config_error(where + ": pump energies must be >= 0");
    }
    if (axis == "coupler_eta" && range.stop > 1.0) {
      throw config_error(where + ": transmissivities must lie in [0, 1]");
    }
  }
  if (traces.samples < 16) throw config_error("traces.samples must be >= 16");
  if (!(traces.turns >= 1.0)) {
    throw config_error("traces.turns must be >= 1 (full phase coverage)");
  }
  if (!(traces.rin >= 0.0)) throw config_error("traces.rin must be >= 0");
  try {
    spectral.grid();
    spectral.model_params().validate();
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    throw config_error(std::string("spectral: ") + e.what());
  }
  if (!(spectral.threshold_db > 0.0)) {
    throw config_error("spectral.threshold_db must be positive");
  }
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw config_error(origin + ": " + e.what());
  }
  if (!root.is_object()) throw config_error(origin + ": top level must be an object");
  check_keys(root,
             {"seed", "out_dir", "chain", "nonlinear_strength_per_sqrt_pj", "sweeps",
              "traces", "spectral"},
             "config");

  RunConfig c = RunConfig::defaults();
  c.seed = get_seed(root, "seed", c.seed, "config");
  c.out_dir = get_string(root, "out_dir", c.out_dir, "config");
  c.nonlinear_strength = get_number(root, "nonlinear_strength_per_sqrt_pj",
                                    c.nonlinear_strength, "config");
  if (root.contains("chain")) {
    if (!root.at("chain").is_object()) throw config_error("chain: expected an object");
    c.chain = parse_chain(root.at("chain"), c.chain);
  }
  if (root.contains("sweeps")) {
    const json& sweeps = root.at("sweeps");
    if (!sweeps.is_object()) throw config_error("sweeps: expected an object");
    for (const auto& item : sweeps.items()) {
      const auto known = default_sweeps().find(item.key());
      if (known == default_sweeps().end()) {
        throw config_error("unknown key: sweeps." + item.key());
      }
      if (!item.value().is_object()) {
        throw config_error("sweeps." + item.key() + ": expected an object");
      }
      c.sweeps[item.key()] =
          parse_range(item.value(), known->second, "sweeps." + item.key());
    }
  }
  if (root.contains("traces")) {
    const json& traces = root.at("traces");
    if (!traces.is_object()) throw config_error("traces: expected an object");
    check_keys(traces, {"samples", "turns", "rin"}, "traces");
    c.traces.samples = get_integer(traces, "samples", c.traces.samples, "traces");
    c.traces.turns = get_number(traces, "turns", c.traces.turns, "traces");
    c.traces.rin = get_number(traces, "rin", c.traces.rin, "traces");
  }
  if (root.contains("spectral")) {
    const json& sp = root.at("spectral");
    if (!sp.is_object()) throw config_error("spectral: expected an object");
    check_keys(sp,
               {"center_wavelength_nm", "span_thz", "bins", "r1_peak", "r2_peak",
                "squeezer_dispersion", "measurement_dispersion", "coupler_table",
                "noise_floor", "sigma_phase", "threshold_db"},
               "spectral");
    // A spectral section must be complete about its physics tables; silent
    // defaulting of a dispersion model would change the result wholesale.
    for (const char* table : {"squeezer_dispersion", "measurement_dispersion"}) {
      if (!sp.contains(table)) {
        throw config_error(std::string("spectral.") + table + ": missing dispersion table");
      }
      if (!sp.at(table).is_object()) {
        throw config_error(std::string("spectral.") + table + ": expected an object");
      }
    }
    SpectralSettings& s = c.spectral;
    s.center_wavelength_m =
        get_number(sp, "center_wavelength_nm", s.center_wavelength_m * 1e9, "spectral") /
        1e9;
    s.span_hz = get_number(sp, "span_thz", s.span_hz / 1e12, "spectral") * 1e12;
    s.bins = get_integer(sp, "bins", s.bins, "spectral");
    s.r1_peak = get_number(sp, "r1_peak", s.r1_peak, "spectral");
    s.r2_peak = get_number(sp, "r2_peak", s.r2_peak, "spectral");
    s.squeezer_dispersion =
        parse_dispersion(sp.at("squeezer_dispersion"), "spectral.squeezer_dispersion");
    s.measurement_dispersion = parse_dispersion(sp.at("measurement_dispersion"),
                                                "spectral.measurement_dispersion");
    if (sp.contains("coupler_table")) {
      if (!sp.at("coupler_table").is_object()) {
        throw config_error("spectral.coupler_table: expected an object");
      }
      s.coupler = parse_coupler(sp.at("coupler_table"), "spectral.coupler_table");
    }
    s.noise_floor = get_number(sp, "noise_floor", s.noise_floor, "spectral");
    s.sigma_phase = get_number(sp, "sigma_phase", s.sigma_phase, "spectral");
    s.threshold_db = get_number(sp, "threshold_db", s.threshold_db, "spectral");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw io_error("cannot open config: " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config(buffer.str(), path);
}

std::string serialize_config(const RunConfig& config) {
  config.validate();
  json sweeps = json::object();
  for (const auto& [axis, range] : config.sweeps) {
    sweeps[axis] = {{"start", range.start}, {"stop", range.stop}, {"points", range.points}};
  }
  json wl = json::array();
  json eta = json::array();
  for (std::size_t i = 0; i < config.spectral.coupler.wavelength_m.size(); ++i) {
    wl.push_back(config.spectral.coupler.wavelength_m[i] * 1e9);
    eta.push_back(config.spectral.coupler.eta[i]);
  }
  const json root = {
      {"seed", config.seed},
      {"out_dir", config.out_dir},
      {"chain",
       {{"r1", config.chain.r1},
        {"r2", config.chain.r2},
        {"phi_pump2", config.chain.phi_pump2},
        {"eta_coupler", config.chain.eta_coupler},
        {"eta_det", config.chain.eta_det},
        {"pump_leak", config.chain.pump_leak},
        {"sigma_phase", config.chain.sigma_phase},
        {"noise_floor", config.chain.noise_floor}}},
      {"nonlinear_strength_per_sqrt_pj", config.nonlinear_strength},
      {"sweeps", sweeps},
      {"traces",
       {{"samples", config.traces.samples},
        {"turns", config.traces.turns},
        {"rin", config.traces.rin}}},
      {"spectral",
       {{"center_wavelength_nm", config.spectral.center_wavelength_m * 1e9},
        {"span_thz", config.spectral.span_hz / 1e12},
        {"bins", config.spectral.bins},
        {"r1_peak", config.spectral.r1_peak},
        {"r2_peak", config.spectral.r2_peak},
        {"squeezer_dispersion", dispersion_json(config.spectral.squeezer_dispersion)},
        {"measurement_dispersion",
         dispersion_json(config.spectral.measurement_dispersion)},
        {"coupler_table", {{"wavelength_nm", wl}, {"eta", eta}}},
        {"noise_floor", config.spectral.noise_floor},
        {"sigma_phase", config.spectral.sigma_phase},
        {"threshold_db", config.spectral.threshold_db}}},
  };
  return root.dump(2) + "\n";
}

void save_config(const RunConfig& config, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw io_error("cannot open for writing: " + path);
  file << serialize_config(config);
  if (!file.good()) throw io_error("write failed: " + path);
}

}  // namespace sqz
