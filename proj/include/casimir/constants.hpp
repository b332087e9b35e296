#pragma once

// CODATA values; single source of truth for every module.
namespace casimir::constants {

inline constexpr double hbar = 1.054571817e-34;   // J s
inline constexpr double c = 2.99792458e8;         // m/s
inline constexpr double k_B = 1.380649e-23;       // J/K
inline constexpr double eps0 = 8.8541878128e-12;  // F/m
inline constexpr double eV = 1.602176634e-19;     // J

// rad/s per eV of photon energy
inline constexpr double eV_over_hbar = eV / hbar;

}  // namespace casimir::constants
