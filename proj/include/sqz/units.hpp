#pragma once

#include <cmath>

namespace sqz::units {

inline constexpr double speed_of_light = 299792458.0;  // m/s

// Parametric gain in dB for squeeze parameter r: 10*log10(e^{2r}) = (20/ln 10)*r.
// Every dB <-> r conversion in the code base goes through these two helpers.
inline constexpr double db_per_unit_r = 8.685889638065035;

inline double r_from_gain_db(double gain_db) { return gain_db / db_per_unit_r; }
inline double gain_db_from_r(double r) { return r * db_per_unit_r; }

inline double db_from_ratio(double ratio) { return 10.0 * std::log10(ratio); }
inline double ratio_from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace sqz::units
