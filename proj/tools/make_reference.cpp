// Regenerates the committed reference artifacts from the built-in defaults:
//   config/default.json      mirror of RunConfig::defaults()
//   data/loss_synthetic.csv  noiseless loss-model dataset (eta 0.7, g 1.4)
//   data/gain_synthetic.csv  noiseless gain-model dataset (eta 0.20, g 1.4)
// Run from the repository root; pass an alternative root as argv[1].

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sqz/chain.hpp"
#include "sqz/config.hpp"
#include "sqz/units.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path root = argc > 1 ? argv[1] : ".";
  std::filesystem::create_directories(root / "config");
  std::filesystem::create_directories(root / "data");

  sqz::save_config(sqz::RunConfig::defaults(), (root / "config" / "default.json").string());

  const double g = 1.4;  // pJ^{-1/2}
  char buf[128];
  {
    // Pump-energy ladder ending at r = 1.2204 (10.6 dB of generated squeezing).
    std::ofstream csv(root / "data" / "loss_synthetic.csv");
    csv << "s_plus_db,s_minus_db\n";
    const double eta = 0.7;
    const double e_top = std::pow(sqz::units::r_from_gain_db(10.6) / g, 2.0);
    for (int i = 1; i <= 10; ++i) {
      const double energy = e_top * i / 10.0;
      const auto s = sqz::lossy_squeezing_limit(g * std::sqrt(energy), eta);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.s_plus_db, s.s_minus_db);
      csv << buf;
    }
  }
  {
    std::ofstream csv(root / "data" / "gain_synthetic.csv");
    csv << "energy_pJ,detected_photons\n";
    const double eta = 0.20;
    for (int i = 0; i < 12; ++i) {
      const double energy = 0.05 * std::pow(3.0 / 0.05, i / 11.0);
      const double s = std::sinh(g * std::sqrt(energy));
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", energy, eta * s * s);
      csv << buf;
    }
  }
  std::printf("wrote config/default.json, data/loss_synthetic.csv, data/gain_synthetic.csv\n");
  return 0;
}
