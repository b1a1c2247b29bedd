#pragma once

#include <numbers>

// Fundamental constants, CODATA 2018. Frozen here rather than configurable so
// that every derived figure in the library is reproducible bit-for-bit.

namespace spinsim::constants {

/// Planck constant [J·s] (exact since the 2019 SI redefinition).
inline constexpr double planck = 6.62607015e-34;

/// Reduced Planck constant [J·s].
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);

/// Boltzmann constant [J/K] (exact).
inline constexpr double boltzmann = 1.380649e-23;

/// Bohr magneton [J/T].
inline constexpr double bohr_magneton = 9.2740100783e-24;

/// Elementary charge [C] (exact).
inline constexpr double elementary_charge = 1.602176634e-19;

/// Bohr magneton [eV/T].
inline constexpr double bohr_magneton_ev = bohr_magneton / elementary_charge;

/// Boltzmann constant [eV/K].
inline constexpr double boltzmann_ev = boltzmann / elementary_charge;

/// Joule -> electronvolt.
inline constexpr double joule_to_ev = 1.0 / elementary_charge;

}  // namespace spinsim::constants
