#pragma once

#include <cmath>

// Unit conventions used throughout: public interfaces speak dBm / dB / dB-per-Hz,
// all internal arithmetic is linear SI (W, A/sqrt(Hz), 1/Hz).

namespace cohbudget {

// CODATA electron charge, coulomb. Not configurable.
inline constexpr double kElectronCharge = 1.602176634e-19;

// Power-ratio conversions. -inf dB maps to 0 linear and back.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt * 1e3); }

} // namespace cohbudget
