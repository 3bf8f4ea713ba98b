#pragma once

#include <cmath>

namespace lora {

// All library-internal quantities are SI linear (W, Hz, m, s). dB/dBm exist
// only at the config-parsing and report-formatting edges.

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

constexpr double kPi = 3.14159265358979323846;

// bps/m^2 -> bps/km^2 (the conventional reporting unit for spatial throughput)
inline double per_m2_to_per_km2(double v) { return v * 1e6; }
inline double per_km2_to_per_m2(double v) { return v * 1e-6; }

}  // namespace lora
