#pragma once

#include <Eigen/Dense>

namespace casimir {

// Perturbative scattering amplitudes of a dielectric half-space bounded by
// h(r) = u e^{iP.r} + v e^{-iP.r} with u = v = 1, evaluated at imaginary
// frequency. Matrices are indexed [outgoing pol][incident pol] in (s, p).
struct ScatterAmplitudes {
  Eigen::Vector2cd r_flat;   // zeroth order (specular Fresnel)
  Eigen::Matrix2cd R1_plus;  // first order, outgoing channel k + P
  Eigen::Matrix2cd R1_minus; // first order, outgoing channel k - P
  Eigen::Matrix2cd R2;       // second order, specular channel (uv component)
};

// Boundary-condition solve order by order in the profile height: continuity
// of the tangential fields (E + grad h * E_z, H + grad h * H_z) Taylor
// expanded about z = 0, one 4x4 complex solve per channel and order.
// eps: permittivity at i zeta; zeta in rad/s; k, P in 1/m.
// with_second_order=false skips the R2 solve (used for the off-channel calls).
ScatterAmplitudes scatter_corrugated(double eps, double zeta, const Eigen::Vector2d& k,
                                     const Eigen::Vector2d& P, bool with_second_order = true);

}  // namespace casimir
