#pragma once

#include <iosfwd>
#include <string>

#include "sqz/config.hpp"
#include "sqz/exec.hpp"

namespace sqz {

enum class FitModel { loss, gain };

/// Command bodies of the CLI, exposed as library functions so the tests can
/// drive them through streams.  All of them throw on error (config_error,
/// io_error, or std numeric exceptions); the CLI maps exception types to exit
/// codes.

/// Finite-gain readout levels for squeezer/measurement gains given in dB.
/// Emits a one-row CSV; a gain-insufficient combination adds a warning
/// comment line.
void cmd_ideal(double r1_gain_db, double r2_gain_db, std::ostream& out);

/// One CSV row per axis value with s_minus_db, s_plus_db, n_vac.  Also writes
/// sweep_<axis>.csv under config.out_dir when set.
void cmd_sweep(const RunConfig& config, const std::string& axis, std::ostream& out,
               Exec exec = Exec::parallel);

/// Per-bin spectrum CSV (frequency_THz, wavelength_nm, s_minus_db, s_plus_db)
/// followed by bandwidth and temporal-characterization summary comment lines.
/// Also writes spectrum.csv under config.out_dir when set.
void cmd_spectrum(const RunConfig& config, std::ostream& out, Exec exec = Exec::parallel);

/// Writes the four calibration trace CSVs plus extraction.json under
/// config.out_dir and prints the extraction summary JSON to `out`.
void cmd_traces(const RunConfig& config, std::ostream& out, Exec exec = Exec::parallel);

/// Fits the loss or gain model to a two-column CSV and prints the result as
/// JSON.  Column meanings: loss -> (s_plus_db, s_minus_db); gain ->
/// (energy_pJ, detected_photons).
void cmd_fit(const std::string& csv_path, FitModel model, std::ostream& out);

}  // namespace sqz
