#pragma once

namespace magguide::constants {

// CODATA 2018 values, SI units.
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double bohr_magneton = 9.2740100783e-24; // J/T
inline constexpr double atomic_mass_unit = 1.66053906660e-27; // kg

// 87Rb atomic mass, 86.909180531 u.
inline constexpr double rb87_mass = 86.909180531 * atomic_mass_unit; // kg

// Landé factor of the 87Rb F=2 ground-state manifold.
inline constexpr double rb87_g_factor = 0.5;

}  // namespace magguide::constants
