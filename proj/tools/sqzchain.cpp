#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sqz/commands.hpp"
#include "sqz/errors.hpp"

namespace {

// Exit codes: 0 success, 2 configuration error (including usage), 3
// numeric/domain error, 4 I/O error.
constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numeric = 3;
constexpr int exit_io = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-OPA squeezing chain: closed forms, spectra, calibration fits"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string axis;
  std::string input_csv;
  std::string model_name;
  std::uint64_t seed = 0;
  double threshold_db = 0.0;
  double r1_gain_db = 0.0;
  double r2_gain_db = 0.0;
  bool serial = false;

  auto* opt_config = app.add_option("--config", config_path, "JSON config file");
  auto* opt_seed = app.add_option("--seed", seed, "override the config seed");
  auto* opt_out = app.add_option("--out", out_dir, "override the output directory");
  auto* opt_threshold =
      app.add_option("--threshold-db", threshold_db, "bandwidth threshold override (dB)");
  app.add_flag("--serial", serial, "use the serial reference kernels");

  auto* sub_ideal =
      app.add_subcommand("ideal", "finite-gain squeezing readout from gains in dB");
  sub_ideal->add_option("r1_gain_db", r1_gain_db, "squeezer OPA gain (dB)")->required();
  sub_ideal->add_option("r2_gain_db", r2_gain_db, "measurement OPA gain (dB)")->required();

  auto* sub_sweep = app.add_subcommand("sweep", "sweep one chain parameter, emit CSV");
  sub_sweep->add_option("--axis", axis,
                        "pump_energy | coupler_eta | detection_loss | "
                        "measurement_gain | sigma_phase")
      ->required();

  auto* sub_spectrum =
      app.add_subcommand("spectrum", "frequency-resolved squeezing spectrum CSV");

  auto* sub_traces =
      app.add_subcommand("traces", "synthesize zero-span calibration traces");

  auto* sub_fit = app.add_subcommand("fit", "fit the loss or gain model to a CSV");
  sub_fit->add_option("input", input_csv, "two-column CSV input")->required();
  sub_fit->add_option("--model", model_name, "loss | gain")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    sqz::RunConfig config =
        config_path.empty() ? sqz::RunConfig::defaults() : sqz::load_config(config_path);
    if (opt_seed->count() > 0) config.seed = seed;
    if (opt_out->count() > 0) config.out_dir = out_dir;
    if (opt_threshold->count() > 0) config.spectral.threshold_db = threshold_db;
    (void)opt_config;
    const sqz::Exec exec = serial ? sqz::Exec::serial : sqz::Exec::parallel;

    if (sub_ideal->parsed()) {
      sqz::cmd_ideal(r1_gain_db, r2_gain_db, std::cout);
    } else if (sub_sweep->parsed()) {
      sqz::cmd_sweep(config, axis, std::cout, exec);
    } else if (sub_spectrum->parsed()) {
      sqz::cmd_spectrum(config, std::cout, exec);
    } else if (sub_traces->parsed()) {
      sqz::cmd_traces(config, std::cout, exec);
    } else if (sub_fit->parsed()) {
      sqz::FitModel model;
      if (model_name == "loss") {
        model = sqz::FitModel::loss;
      } else if (model_name == "gain") {
        model = sqz::FitModel::gain;
      } else {
        throw sqz::config_error("unknown fit model: " + model_name);
      }
      sqz::cmd_fit(input_csv, model, std::cout);
    }
    return exit_ok;
  } catch (const sqz::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const sqz::io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_io;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numeric;
  }
}
