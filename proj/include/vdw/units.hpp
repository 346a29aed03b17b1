#pragma once

// SI <-> natural-unit conversion (hbar = c = epsilon_0 = 1, lengths in metres).

#include <cmath>

namespace vdw::units {

// CODATA 2018.
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double c = 299792458.0;              // m / s
inline constexpr double epsilon0 = 8.8541878128e-12;  // F / m

/// Angular frequency (rad/s) to wavenumber (1/m).
inline constexpr double frequency_to_natural(double omega) { return omega / c; }
/// Time (s) to light-travel length (m).
inline constexpr double time_to_natural(double t) { return c * t; }
/// Dipole moment (C m) to natural units: mu / sqrt(epsilon_0 hbar c).
inline double dipole_to_natural(double mu) { return mu / std::sqrt(epsilon0 * hbar * c); }
/// Natural energy (1/m) to joules.
inline constexpr double energy_to_si(double e) { return hbar * c * e; }
/// Natural force (1/m^2) to newtons.
inline constexpr double force_to_si(double f) { return hbar * c * f; }

} // namespace vdw::units
