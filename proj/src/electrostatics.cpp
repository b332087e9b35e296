#include "casimir/electrostatics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"

namespace casimir {

namespace {

using constants::eps0;

double sinc(double u) { return std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u; }

// (1/A) int_A cos(k1.r + p1) cos(k2.r + p2) d^2x in the long-plate limit
// along x (delta algebra in the x wavenumber, since Lx spans many periods)
// with the finite extent kept in y, where it windows to a sinc factor.
double windowed_overlap(const ProfileMode& m1, const ProfileMode& m2, double Ly) {
  const Eigen::Vector2d dk = m1.k - m2.k;
  const Eigen::Vector2d sk = m1.k + m2.k;
  double acc = 0.0;
  if (std::abs(dk.x()) * Ly < 1e-9)
    acc += 0.5 * std::cos(m1.phase - m2.phase) * sinc(0.5 * dk.y() * Ly);
  if (std::abs(sk.x()) * Ly < 1e-9)
    acc += 0.5 * std::cos(m1.phase + m2.phase) * sinc(0.5 * sk.y() * Ly);
  return m1.amp * m2.amp * acc;
}

double coth(double u) { return 1.0 / std::tanh(u); }

}  // namespace

SpectralProfilePair SpectralProfilePair::from_geometry(const CorrugationGeometry& geom,
                                                       double theta) {
  const double q = 2.0 * M_PI / geom.period;
  SpectralProfilePair p;
  p.Lx = geom.Lx;
  p.Ly = geom.Ly;
  p.plate.push_back({geom.A1, {q, 0.0}, geom.phase});
  p.sphere.push_back({geom.A2, {q, -q * theta}, geom.phase});
  return p;
}

double electro_energy_spectral(const SpectralProfilePair& profiles, double z, double V) {
  if (z <= 0.0) throw std::domain_error("electro_energy_spectral: z must be > 0");
  double self = 0.0;
  for (const auto* list : {&profiles.plate, &profiles.sphere})
    for (const ProfileMode& m : *list) {
      const double k = m.k.norm();
      self += 0.5 * k * coth(k * z) * (m.amp * m.amp / 2.0);
    }
  double cross = 0.0;
  for (const ProfileMode& m1 : profiles.plate)
    for (const ProfileMode& m2 : profiles.sphere) {
      const double k = 0.5 * (m1.k.norm() + m2.k.norm());
      const double f = k * std::exp(-k * z) / (1.0 - std::exp(-2.0 * k * z));
      cross += 2.0 * f * windowed_overlap(m1, m2, profiles.Ly);
    }
  return eps0 * V * V / (2.0 * z) + eps0 * V * V / (z * z) * (self - cross);
}

double electro_energy_corrugated(const CorrugationGeometry& geom, double z, double V,
                                 double theta) {
  if (z <= 0.0) throw std::domain_error("electro_energy_corrugated: z must be > 0");
  const double L = geom.period;
  const double qz = 2.0 * M_PI * z / L;
  const double self = (M_PI / L) * (geom.A1 * geom.A1 + geom.A2 * geom.A2) * coth(qz);
  const double cross = (4.0 * M_PI * geom.A1 * geom.A2 / L) * std::exp(-qz) /
                       (1.0 - std::exp(-2.0 * qz)) * sinc(M_PI * geom.Ly * theta / L);
  return eps0 * V * V / (2.0 * z) + 0.5 * eps0 * V * V / (z * z) * (self - cross);
}

ElectroCoefficient x_coefficient(const CorrugationGeometry& geom, double z, double theta) {
  if (z <= 0.0) throw std::domain_error("x_coefficient: z must be > 0");
  ElectroCoefficient c;
  c.z = z;
  c.flat = M_PI * eps0 * geom.R / z;
  const double L = geom.period;
  const double qz = 2.0 * M_PI * z / L;
  const double pre = M_PI * eps0 * geom.R / (z * z);
  c.self_term = pre * (M_PI / L) * (geom.A1 * geom.A1 + geom.A2 * geom.A2) * coth(qz);
  c.cross_term = pre * (4.0 * M_PI * geom.A1 * geom.A2 / L) * std::exp(-qz) /
                 (1.0 - std::exp(-2.0 * qz)) * sinc(M_PI * geom.Ly * theta / L);
  c.X = c.flat + c.self_term - c.cross_term;
  return c;
}

// Transfinite mapping x = xi, z_phys = b(xi) + eta g(xi) with b the bottom
// surface, g the local gap and eta in [0, 1]. Laplace's equation becomes
//   Phi_xixi + B Phi_xieta + C Phi_etaeta + D Phi_eta = 0,
// discretized with second-order central differences, periodic in xi.
double laplace_solve(const CorrugationGeometry& geom, double z, double V,
                     const LaplaceGrid& grid) {
  if (z <= geom.A1 + geom.A2) throw std::domain_error("laplace_solve: plates in contact");
  const int Nx = grid.x_nodes, Ne = grid.eta_nodes;
  if (Nx < 8 || Ne < 8) throw accuracy_error("laplace_solve: grid too coarse");
  const double L = geom.period;
  const double q = 2.0 * M_PI / L;
  const double dxi = L / Nx;
  const double de = 1.0 / Ne;

  // bottom: h1 at potential V; top: z + h2 at potential 0 (imprint registry)
  std::vector<double> b(Nx), bp(Nx), bpp(Nx), g(Nx), gp(Nx), gpp(Nx);
  for (int i = 0; i < Nx; ++i) {
    const double x = i * dxi;
    const double c1 = std::cos(q * x + geom.phase), s1 = std::sin(q * x + geom.phase);
    b[i] = geom.A1 * c1;
    bp[i] = -geom.A1 * q * s1;
    bpp[i] = -geom.A1 * q * q * c1;
    const double top = z + geom.A2 * c1;
    const double topp = -geom.A2 * q * s1;
    const double toppp = -geom.A2 * q * q * c1;
    g[i] = top - b[i];
    gp[i] = topp - bp[i];
    gpp[i] = toppp - bpp[i];
    if (g[i] <= 0.0) throw std::domain_error("laplace_solve: surfaces intersect");
  }

  const int N = Nx * (Ne - 1);
  auto idx = [&](int i, int j) { return (j - 1) * Nx + ((i % Nx) + Nx) % Nx; };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(9) * N);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  for (int j = 1; j < Ne; ++j) {
    const double e = j * de;
    for (int i = 0; i < Nx; ++i) {
      const double a = bp[i] + e * gp[i];
      const double B = -2.0 * a / g[i];
      const double C = (1.0 + a * a) / (g[i] * g[i]);
      const double ax = bpp[i] + e * gpp[i];
      const double D = -ax / g[i] + 2.0 * a * gp[i] / (g[i] * g[i]);
      const int row = idx(i, j);
      auto add = [&](int ii, int jj, double v) {
        if (jj == 0)
          rhs(row) -= v * V;  // Phi = V on the bottom surface
        else if (jj == Ne)
          ;  // Phi = 0 on the top surface
        else
          trip.emplace_back(row, idx(ii, jj), v);
      };
      add(i, j, -2.0 / (dxi * dxi) - 2.0 * C / (de * de));
      add(i + 1, j, 1.0 / (dxi * dxi));
      add(i - 1, j, 1.0 / (dxi * dxi));
      add(i, j + 1, C / (de * de) + D / (2.0 * de));
      add(i, j - 1, C / (de * de) - D / (2.0 * de));
      add(i + 1, j + 1, B / (4.0 * dxi * de));
      add(i - 1, j - 1, B / (4.0 * dxi * de));
      add(i + 1, j - 1, -B / (4.0 * dxi * de));
      add(i - 1, j + 1, -B / (4.0 * dxi * de));
    }
  }
  Eigen::SparseMatrix<double> M(N, N);
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(M);
  if (solver.info() != Eigen::Success)
    throw accuracy_error("laplace_solve: sparse factorization failed");
  const Eigen::VectorXd sol = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw accuracy_error("laplace_solve: solve failed");

  // Phi on the full (Nx, Ne+1) grid including the Dirichlet rows.
  Eigen::MatrixXd Phi = Eigen::MatrixXd::Zero(Nx, Ne + 1);
  for (int i = 0; i < Nx; ++i) Phi(i, 0) = V;
  for (int j = 1; j < Ne; ++j)
    for (int i = 0; i < Nx; ++i) Phi(i, j) = sol(idx(i, j));

  // U/A = eps0/(2L) int (Ex^2 + Ez^2) g deta dxi with
  // Phi_x = Phi_xi - (a/g) Phi_eta, Phi_z = Phi_eta / g.
  double U = 0.0;
  for (int j = 0; j <= Ne; ++j) {
    const double e = j * de;
    const double w = (j == 0 || j == Ne) ? 0.5 * de : de;
    for (int i = 0; i < Nx; ++i) {
      const int ip = (i + 1) % Nx, im = (i + Nx - 1) % Nx;
      const double pxi = (Phi(ip, j) - Phi(im, j)) / (2.0 * dxi);
      double pe;
      if (j == 0)
        pe = (Phi(i, 1) - Phi(i, 0)) / de - 0.5 * (Phi(i, 2) - 2.0 * Phi(i, 1) + Phi(i, 0)) / de;
      else if (j == Ne)
        pe = (Phi(i, Ne) - Phi(i, Ne - 1)) / de +
             0.5 * (Phi(i, Ne) - 2.0 * Phi(i, Ne - 1) + Phi(i, Ne - 2)) / de;
      else
        pe = (Phi(i, j + 1) - Phi(i, j - 1)) / (2.0 * de);
      const double a = bp[i] + e * gp[i];
      const double Ex = pxi - (a / g[i]) * pe;
      const double Ez = pe / g[i];
      U += w * (Ex * Ex + Ez * Ez) * g[i] * dxi;
    }
  }
  return eps0 / (2.0 * L) * U;
}

PerturbativeValidationReport validate_perturbative(const CorrugationGeometry& geom,
                                                   const std::vector<double>& z_grid,
                                                   const LaplaceGrid& grid) {
  PerturbativeValidationReport rep;
  for (double z : z_grid) {
    PerturbativeValidationRow row;
    row.z = z;
    row.e_perturbative = electro_energy_corrugated(geom, z, 1.0, 0.0);
    row.e_laplace = laplace_solve(geom, z, 1.0, grid);
    row.rel_dev = std::abs(row.e_laplace / row.e_perturbative - 1.0);
    rep.max_rel_dev = std::max(rep.max_rel_dev, row.rel_dev);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace casimir
