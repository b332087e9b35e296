#pragma once

#include <string>
#include <vector>

#include "casimir/plate_table.hpp"

namespace casimir {

struct CorrugationGeometry {
  double period = 0.0;      // Lambda, m
  double A1 = 0.0;          // plate corrugation amplitude, m
  double A2 = 0.0;          // sphere corrugation amplitude, m
  double Lx = 0.0;          // plate extent along the corrugation axis, m
  double Ly = 0.0;          // plate extent across, m
  double R = 0.0;           // sphere radius, m
  double theta = 0.0;       // crossing angle, rad
  double phase = 0.0;       // registry phase, rad (0 = conformal imprint)
  double roughness1 = 0.0;  // metadata only
  double roughness2 = 0.0;  // metadata only

  static CorrugationGeometry from_json_file(const std::string& path);
};

// Local separation H(x, y) = z + A1 cos(2 pi x / L + phase)
//                              - A2 cos(2 pi (x - y theta) / L + phase)
// (small-angle profile, valid for theta <= 3 deg).
double local_separation(const CorrugationGeometry& geom, double z, double x, double y);

struct CellQuadrature {
  int x_nodes = 128;             // per period, periodic trapezoid
  int y_nodes = 128;             // Gauss-Legendre across [-Ly/2, Ly/2]
  bool infinite_plates = false;  // replace the finite y-average by a full beat average
};

// Proximity-force cell average (1/(L Ly)) int U(H(x,y)) over the plate.
double energy_pfa(const CorrugationGeometry& geom, const PlateFunctionTable& table, double z,
                  double theta, const CellQuadrature& quad = {});

// Derivative expansion: adds alpha(H) |grad H|^2 - (1/2)(H U'(H) - U(H)) grad h1 . grad h2.
double energy_derivative_expansion(const CorrugationGeometry& geom,
                                   const PlateFunctionTable& table, double z, double theta,
                                   const CellQuadrature& quad = {});

enum class ForceMethod { DER, PFA, DER_T0, DER_IDEAL };

std::string to_string(ForceMethod m);

// F = 2 pi R U_corr (attractive, F < 0). The caller supplies the table built
// for the matching material/temperature variant of `method`.
double force_sphere(const CorrugationGeometry& geom, const PlateFunctionTable& table, double z,
                    double theta, ForceMethod method, const CellQuadrature& quad = {});

struct ForcePoint {
  double z = 0.0;  // m
  double F = 0.0;  // N (negative)
  ForceMethod method = ForceMethod::DER;
  double theta = 0.0;  // rad
};

struct ForceCurve {
  std::vector<ForcePoint> points;
};

ForceCurve force_curve(const CorrugationGeometry& geom, const PlateFunctionTable& table,
                       const std::vector<double>& z_grid, double theta, ForceMethod method,
                       const CellQuadrature& quad = {});

struct ComparisonRow {
  double z = 0.0;
  double ratio = 0.0;       // F_a / F_b
  double difference = 0.0;  // F_a - F_b, N
};

// Per-z ratio and difference of two curves on identical z-grids.
std::vector<ComparisonRow> comparison_report(const ForceCurve& a, const ForceCurve& b);

// Roughness correction hook (out of scope, documented no-op).
inline double roughness_correction(const CorrugationGeometry&, double F) { return F; }

}  // namespace casimir
