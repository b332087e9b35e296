#pragma once

#include "casimir/material.hpp"

namespace casimir {

// Wick-rotated kinematics for one (zeta, k) pair.
struct WaveKinematics {
  double zeta = 0.0;       // rad/s
  double k = 0.0;          // transverse wavenumber, 1/m
  double kappa = 0.0;      // sqrt(zeta^2/c^2 + k^2)
  double kappa_bar = 0.0;  // sqrt(eps zeta^2/c^2 + k^2)

  static WaveKinematics make(double eps, double zeta, double k);
};

// Fresnel coefficients at imaginary frequency (Drude zeta=0 limits built in):
// TM: r1 = (eps kappa - kappa_bar)/(eps kappa + kappa_bar) in [0,1)
// TE: r2 = (kappa - kappa_bar)/(kappa + kappa_bar) in (-1,0]
double fresnel_tm(double eps, double zeta, double k);
double fresnel_te(double eps, double zeta, double k);

struct PlateEnergyPoint {
  double H = 0.0;       // m
  double U = 0.0;       // J/m^2
  double Uprime = 0.0;  // J/m^3
};

struct LifshitzOptions {
  int radial_nodes = 40;          // Gauss-Legendre nodes per radial panel
  double matsubara_tol = 1e-9;    // tail tolerance for the n-sum
};

// Casimir energy per unit area between identical plates,
// U(H) = k_B T sum'_n int d^2k/(2pi)^2 sum_p ln(1 - r_p^2 e^{-2 H kappa}).
double plate_energy(const MaterialModel& model, double T, double H,
                    const LifshitzOptions& opts = {});

// dU/dH, by analytic differentiation under the integral sign (positive).
double plate_energy_derivative(const MaterialModel& model, double T, double H,
                               const LifshitzOptions& opts = {});

// T = 0 variant: the Matsubara sum becomes (hbar/2pi) * integral over zeta.
double plate_energy_T0(const MaterialModel& model, double H,
                       const LifshitzOptions& opts = {});
double plate_energy_T0_derivative(const MaterialModel& model, double H,
                                  const LifshitzOptions& opts = {});

}  // namespace casimir
