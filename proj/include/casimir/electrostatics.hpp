#pragma once

#include <vector>

#include <Eigen/Dense>

#include "casimir/corrugation.hpp"

namespace casimir {

// One cosine mode a cos(k . r + phase) of a zero-mean height profile.
struct ProfileMode {
  double amp = 0.0;    // m
  Eigen::Vector2d k;   // 1/m
  double phase = 0.0;  // rad
};

// Fourier representation of the two facing profiles over a finite rectangle.
struct SpectralProfilePair {
  std::vector<ProfileMode> plate;   // h1
  std::vector<ProfileMode> sphere;  // h2
  double Lx = 0.0;                  // m
  double Ly = 0.0;                  // m

  static SpectralProfilePair from_geometry(const CorrugationGeometry& geom, double theta);
};

// Second-order perturbative electrostatic energy per area between the two
// profiles held at potential difference V across mean gap z:
//   eps0 V^2 / (2z)
//   + (eps0 V^2 / z^2) (1/A) int d^2k/(2pi)^2 [ (k/2) coth(kz) (|h1|^2+|h2|^2)
//       - k e^{-kz}/(1 - e^{-2kz}) (h1 h2* + h2 h1*) ].
// Finite plate size enters through the windowed overlap of cross-profile
// mode pairs (the sinc factors); same-profile modes use Parseval directly.
double electro_energy_spectral(const SpectralProfilePair& profiles, double z, double V);

// Closed form of the above for the crossed sinusoidal gratings (small angle):
//   eps0 V^2/(2z) + (eps0 V^2 / 2 z^2) [ (pi/L)(A1^2+A2^2) coth(2 pi z/L)
//     - (4 pi A1 A2 / L) e^{-2 pi z/L}/(1 - e^{-4 pi z/L}) sinc(pi Ly theta/L) ].
double electro_energy_corrugated(const CorrugationGeometry& geom, double z, double V,
                                 double theta);

struct ElectroCoefficient {
  double z = 0.0;           // m
  double X = 0.0;           // N/V^2
  double flat = 0.0;        // pi eps0 R / z
  double self_term = 0.0;   // N/V^2, corrugation self-correlation part
  double cross_term = 0.0;  // N/V^2, cross-correlation part (enters with minus)
};

// Sphere-plate electrostatic force coefficient, F_el = X(z) (V - V0)^2:
// X(z) = pi eps0 R / z + (pi eps0 R / z^2) [ self - cross * sinc ].
ElectroCoefficient x_coefficient(const CorrugationGeometry& geom, double z, double theta);

struct LaplaceGrid {
  int x_nodes = 96;    // per period, periodic
  int eta_nodes = 96;  // across the gap
};

// Independent oracle: 2D Laplace solve (theta = 0 cross-section, periodic in
// x over one period) on a boundary-fitted transfinite mapping of the strip
// between the corrugated surfaces. Returns energy per area.
double laplace_solve(const CorrugationGeometry& geom, double z, double V,
                     const LaplaceGrid& grid = {});

struct PerturbativeValidationRow {
  double z = 0.0;
  double e_perturbative = 0.0;  // J/m^2
  double e_laplace = 0.0;       // J/m^2
  double rel_dev = 0.0;
};

struct PerturbativeValidationReport {
  std::vector<PerturbativeValidationRow> rows;
  double max_rel_dev = 0.0;
};

// Sweeps laplace_solve against electro_energy_corrugated at theta = 0.
PerturbativeValidationReport validate_perturbative(const CorrugationGeometry& geom,
                                                   const std::vector<double>& z_grid,
                                                   const LaplaceGrid& grid = {});

}  // namespace casimir
