#include "sqz/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "sqz/calibration.hpp"
#include "sqz/errors.hpp"
#include "sqz/units.hpp"

namespace sqz {

namespace {

std::string full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream file(path);
  if (!file) throw io_error("cannot open for writing: " + path);
  file << text;
  if (!file.good()) throw io_error("write failed: " + path);
}

std::filesystem::path prepare_out_dir(const std::string& out_dir) {
  std::filesystem::path dir = out_dir.empty() ? "." : out_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw io_error("cannot create output directory: " + dir.string());
  return dir;
}

std::vector<double> axis_values(const SweepRange& range) {
  std::vector<double> values(static_cast<std::size_t>(range.points));
  for (int i = 0; i < range.points; ++i) {
    values[i] = range.points == 1
                    ? range.start
                    : range.start + (range.stop - range.start) * i / (range.points - 1);
  }
  return values;
}

ChainParams chain_at(const RunConfig& config, const std::string& axis, double value) {
  ChainParams p = config.chain;
  if (axis == "pump_energy") {
    p.r1 = config.nonlinear_strength * std::sqrt(value);
  } else if (axis == "coupler_eta") {
    p.eta_coupler = value;
  } else if (axis == "detection_loss") {
    p.eta_det = units::ratio_from_db(-value);
  } else if (axis == "measurement_gain") {
    p.r2 = units::r_from_gain_db(value);
  } else if (axis == "sigma_phase") {
    p.sigma_phase = value;
  } else {
    throw config_error("unknown sweep axis: " + axis);
  }
  return p;
}

struct ParsedCsv {
  std::vector<std::pair<double, double>> rows;
};

// Two-column numeric CSV; '#' comments and a single non-numeric header row
// are permitted.  Errors carry the 1-based line number.
ParsedCsv read_two_column_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw io_error("cannot open for reading: " + path);
  ParsedCsv out;
  std::string line;
  int line_no = 0;
  bool header_allowed = true;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw config_error(path + ":" + std::to_string(line_no) +
                         ": expected two comma-separated columns");
    }
    const std::string a = line.substr(0, comma);
    const std::string b = line.substr(comma + 1);
    try {
      std::size_t used_a = 0, used_b = 0;
      const double x = std::stod(a, &used_a);
      const double y = std::stod(b, &used_b);
      while (used_a < a.size() && std::isspace(static_cast<unsigned char>(a[used_a]))) ++used_a;
      while (used_b < b.size() && std::isspace(static_cast<unsigned char>(b[used_b]))) ++used_b;
      if (used_a != a.size() || used_b != b.size()) {
        throw std::invalid_argument("trailing characters");
      }
      out.rows.emplace_back(x, y);
      header_allowed = false;
    } catch (const std::exception&) {
      if (header_allowed) {
        header_allowed = false;  // one column-name row is fine
        continue;
      }
      throw config_error(path + ":" + std::to_string(line_no) + ": malformed number");
    }
  }
  if (out.rows.empty()) {
    throw config_error(path + ": no data rows");
  }
  return out;
}

}  // namespace

void cmd_ideal(double r1_gain_db, double r2_gain_db, std::ostream& out) {
  if (!(r1_gain_db >= 0.0) || !std::isfinite(r1_gain_db)) {
    throw std::invalid_argument("squeezer gain must be >= 0 dB");
  }
  if (!std::isfinite(r2_gain_db) || r2_gain_db < 0.0) {
    throw std::invalid_argument("measurement gain must be >= 0 dB");
  }
  const IdealSqueezing s = ideal_squeezing(units::r_from_gain_db(r1_gain_db),
                                           units::r_from_gain_db(r2_gain_db));
  if (s.gain_insufficient) {
    out << "# warning: squeezer gain exceeds measurement gain (readout not converged)\n";
  }
  out << "r1_gain_db,r2_gain_db,s_minus_db,s_plus_db\n";
  out << full(r1_gain_db) << ',' << full(r2_gain_db) << ',' << full(s.s_minus_db) << ','
      << full(s.s_plus_db) << '\n';
}

void cmd_sweep(const RunConfig& config, const std::string& axis, std::ostream& out,
               Exec exec) {
  config.validate();
  const auto it = config.sweeps.find(axis);
  if (it == config.sweeps.end()) {
    throw config_error("no sweep range configured for axis: " + axis);
  }
  const std::vector<double> values = axis_values(it->second);
  std::vector<ChainParams> points;
  points.reserve(values.size());
  for (double v : values) points.push_back(chain_at(config, axis, v));
  const std::vector<SqueezingResult> results = simulate_many(points, exec);

  std::ostringstream csv;
  csv << axis << ",s_minus_db,s_plus_db,n_vac\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    csv << full(values[i]) << ',' << full(results[i].s_minus_db) << ','
        << full(results[i].s_plus_db) << ',' << full(results[i].n_vac) << '\n';
  }
  out << csv.str();
  if (!config.out_dir.empty()) {
    const auto dir = prepare_out_dir(config.out_dir);
    write_text_file((dir / ("sweep_" + axis + ".csv")).string(), csv.str());
  }
}

void cmd_spectrum(const RunConfig& config, std::ostream& out, Exec exec) {
  config.validate();
  const SpectralGrid grid = config.spectral.grid();
  const SpectralModelParams params = config.spectral.model_params();
  const std::vector<SqueezingResult> spectrum = squeezing_spectrum(params, grid, exec);

  std::vector<double> freq_hz(spectrum.size()), magnitude_db(spectrum.size()),
      magnitude_linear(spectrum.size());
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    freq_hz[i] = grid.frequency_hz(static_cast<int>(i));
    // Squeezing magnitude: depth below shot noise, in dB and as the linear
    // noise-reduction fraction 1 - 10^{s/10}.
    magnitude_db[i] = std::max(0.0, -spectrum[i].s_minus_db);
    magnitude_linear[i] =
        std::max(0.0, 1.0 - units::ratio_from_db(spectrum[i].s_minus_db));
  }
  const BandwidthResult bw = bandwidth(magnitude_db, freq_hz, config.spectral.threshold_db);
  const TemporalCharacterization gauss =
      temporal_cycles(magnitude_linear, grid, PulseShape::gaussian_fit);
  const TemporalCharacterization numeric =
      temporal_cycles(magnitude_linear, grid, PulseShape::transform_limit_numeric);

  std::ostringstream csv;
  csv << "frequency_THz,wavelength_nm,s_minus_db,s_plus_db\n";
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    csv << full(freq_hz[i] * 1e-12) << ','
        << full(grid.wavelength_m(static_cast<int>(i)) * 1e9) << ','
        << full(spectrum[i].s_minus_db) << ',' << full(spectrum[i].s_plus_db) << '\n';
  }
  csv << "# bandwidth_thz=" << full(bw.width_hz * 1e-12)
      << " threshold_db=" << full(config.spectral.threshold_db)
      << " saturated=" << (bw.saturated ? 1 : 0) << '\n';
  csv << "# temporal_cycles_gaussian_fit=" << full(gauss.cycles)
      << " duration_fs=" << full(gauss.duration_s * 1e15)
      << " saturated=" << (gauss.saturated ? 1 : 0) << '\n';
  csv << "# temporal_cycles_transform_limit=" << full(numeric.cycles)
      << " duration_fs=" << full(numeric.duration_s * 1e15)
      << " saturated=" << (numeric.saturated ? 1 : 0) << '\n';
  out << csv.str();
  if (!config.out_dir.empty()) {
    const auto dir = prepare_out_dir(config.out_dir);
    write_text_file((dir / "spectrum.csv").string(), csv.str());
  }
}

void cmd_traces(const RunConfig& config, std::ostream& out, Exec exec) {
  config.validate();
  std::vector<double> ramp(static_cast<std::size_t>(config.traces.samples));
  const double span = 2.0 * std::numbers::pi * config.traces.turns;
  for (int i = 0; i < config.traces.samples; ++i) {
    ramp[i] = span * i / (config.traces.samples - 1);
  }
  const TraceSet traces =
      synthesize_traces(config.chain, ramp, config.traces.rin, config.seed, exec);
  const SqueezingResult extraction = extract_squeezing(traces);

  const auto dir = prepare_out_dir(config.out_dir);
  for (const auto& trace : traces) {
    write_trace_csv((dir / ("traces_" + to_string(trace.label) + ".csv")).string(), trace);
  }
  const nlohmann::json summary = {
      {"s_minus_db", extraction.s_minus_db}, {"s_plus_db", extraction.s_plus_db},
      {"n_minus", extraction.n_minus},       {"n_plus", extraction.n_plus},
      {"n_vac", extraction.n_vac},
  };
  const std::string text = summary.dump(2) + "\n";
  write_text_file((dir / "extraction.json").string(), text);
  out << text;
}

void cmd_fit(const std::string& csv_path, FitModel model, std::ostream& out) {
  const ParsedCsv csv = read_two_column_csv(csv_path);
  nlohmann::json result;
  if (model == FitModel::loss) {
    std::vector<LossPoint> data;
    data.reserve(csv.rows.size());
    for (const auto& [a, b] : csv.rows) data.push_back({a, b});
    const LossFitResult fit = fit_loss_model(data);
    result = {{"model", "loss"},
              {"eta_hat", fit.eta_hat},
              {"r_hat", fit.r_hat},
              {"residual_db", fit.residual_db},
              {"inferred_squeezing_db", fit.inferred_squeezing_db},
              {"underdetermined", fit.underdetermined}};
    if (fit.underdetermined) result["eta_hat"] = nullptr;
  } else {
    std::vector<GainPoint> data;
    data.reserve(csv.rows.size());
    for (const auto& [e, n] : csv.rows) data.push_back({e, n});
    const GainFitResult fit = fit_gain_curve(data);
    result = {{"model", "gain"},
              {"g_hat", fit.g_hat},
              {"eta_overall_hat", fit.eta_overall_hat},
              {"residual", fit.residual}};
  }
  out << result.dump(2) << "\n";
}

}  // namespace sqz
