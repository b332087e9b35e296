#include "casimir/corrugation.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "casimir/errors.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

namespace {

struct CellPoint {
  double H;       // local separation
  double dHx;     // dH/dx
  double dHy;     // dH/dy
  double g1g2;    // grad h1 . grad h2
};

CellPoint cell_point(const CorrugationGeometry& g, double z, double theta, double x, double y) {
  const double q = 2.0 * M_PI / g.period;
  const double p1 = q * x + g.phase;
  const double p2 = q * (x - y * theta) + g.phase;
  CellPoint c;
  c.H = z + g.A1 * std::cos(p1) - g.A2 * std::cos(p2);
  const double dh1 = -g.A1 * q * std::sin(p1);
  const double dh2x = -g.A2 * q * std::sin(p2);
  const double dh2y = g.A2 * q * theta * std::sin(p2);
  c.dHx = dh1 - dh2x;
  c.dHy = -dh2y;
  c.g1g2 = dh1 * dh2x;
  return c;
}

// Cell average of f(CellPoint). Finite plates: periodic trapezoid in x,
// Gauss-Legendre in y over [-Ly/2, Ly/2]. Infinite plates: the y-average is
// replaced by a uniform average over the registry phase psi = q y theta,
// which is the theta-independent change-of-variables form.
template <class F>
double cell_average(const CorrugationGeometry& g, double z, double theta,
                    const CellQuadrature& quad, F&& f) {
  const double q = 2.0 * M_PI / g.period;
  double acc = 0.0;
  if (quad.infinite_plates || theta == 0.0) {
    const int ny = quad.infinite_plates && theta != 0.0 ? quad.y_nodes : 1;
    for (int j = 0; j < ny; ++j) {
      // psi sampled uniformly over a beat; y chosen to realize that psi
      const double y = theta != 0.0
                           ? (static_cast<double>(j) + 0.5) / ny * (2.0 * M_PI) / (q * theta)
                           : 0.0;
      for (int i = 0; i < quad.x_nodes; ++i) {
        const double x = g.period * static_cast<double>(i) / quad.x_nodes;
        acc += f(cell_point(g, z, theta, x, y));
      }
    }
    return acc / (static_cast<double>(quad.x_nodes) * ny);
  }
  const GaussLegendre& gl = gauss_legendre(quad.y_nodes);
  double wsum = 0.0;
  for (std::size_t j = 0; j < gl.x.size(); ++j) {
    const double y = 0.5 * g.Ly * gl.x[j];
    const double w = 0.5 * g.Ly * gl.w[j];
    double xacc = 0.0;
    for (int i = 0; i < quad.x_nodes; ++i) {
      const double x = g.period * static_cast<double>(i) / quad.x_nodes;
      xacc += f(cell_point(g, z, theta, x, y));
    }
    acc += w * xacc / quad.x_nodes;
    wsum += w;
  }
  return acc / wsum;
}

}  // namespace

double local_separation(const CorrugationGeometry& geom, double z, double x, double y) {
  if (z <= geom.A1 + geom.A2)
    throw std::domain_error("local_separation: z must exceed A1 + A2 (contact)");
  const double H = cell_point(geom, z, geom.theta, x, y).H;
  if (H <= 0.0) throw std::domain_error("local_separation: contact (H <= 0)");
  return H;
}

double energy_pfa(const CorrugationGeometry& geom, const PlateFunctionTable& table, double z,
                  double theta, const CellQuadrature& quad) {
  if (z <= geom.A1 + geom.A2) throw std::domain_error("energy_pfa: contact");
  return cell_average(geom, z, theta, quad, [&](const CellPoint& c) { return table.U(c.H); });
}

double energy_derivative_expansion(const CorrugationGeometry& geom,
                                   const PlateFunctionTable& table, double z, double theta,
                                   const CellQuadrature& quad) {
  if (z <= geom.A1 + geom.A2) throw std::domain_error("energy_derivative_expansion: contact");
  return cell_average(geom, z, theta, quad, [&](const CellPoint& c) {
    const double U = table.U(c.H);
    const double Up = table.Uprime(c.H);
    const double al = table.alpha(c.H);
    const double grad2 = c.dHx * c.dHx + c.dHy * c.dHy;
    return U + al * grad2 - 0.5 * (c.H * Up - U) * c.g1g2;
  });
}

std::string to_string(ForceMethod m) {
  switch (m) {
    case ForceMethod::DER: return "DER";
    case ForceMethod::PFA: return "PFA";
    case ForceMethod::DER_T0: return "DER_T0";
    case ForceMethod::DER_IDEAL: return "DER_IDEAL";
  }
  return "?";
}

double force_sphere(const CorrugationGeometry& geom, const PlateFunctionTable& table, double z,
                    double theta, ForceMethod method, const CellQuadrature& quad) {
  const double u = method == ForceMethod::PFA
                       ? energy_pfa(geom, table, z, theta, quad)
                       : energy_derivative_expansion(geom, table, z, theta, quad);
  return 2.0 * M_PI * geom.R * u;
}

ForceCurve force_curve(const CorrugationGeometry& geom, const PlateFunctionTable& table,
                       const std::vector<double>& z_grid, double theta, ForceMethod method,
                       const CellQuadrature& quad) {
  ForceCurve curve;
  curve.points.reserve(z_grid.size());
  for (double z : z_grid)
    curve.points.push_back({z, force_sphere(geom, table, z, theta, method, quad), method, theta});
  std::sort(curve.points.begin(), curve.points.end(),
            [](const ForcePoint& a, const ForcePoint& b) { return a.z < b.z; });
  return curve;
}

std::vector<ComparisonRow> comparison_report(const ForceCurve& a, const ForceCurve& b) {
  if (a.points.size() != b.points.size())
    throw data_error("comparison_report: z-grid size mismatch");
  std::vector<ComparisonRow> rows;
  rows.reserve(a.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    if (std::abs(a.points[i].z - b.points[i].z) > 1e-15)
      throw data_error("comparison_report: z-grid mismatch");
    rows.push_back({a.points[i].z, a.points[i].F / b.points[i].F,
                    a.points[i].F - b.points[i].F});
  }
  return rows;
}

CorrugationGeometry CorrugationGeometry::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("geometry file not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw data_error("geometry file parse error in " + path + ": " + e.what());
  }
  CorrugationGeometry g;
  try {
    g.period = j.at("period_nm").get<double>() * 1e-9;
    g.A1 = j.at("amplitude_plate_nm").get<double>() * 1e-9;
    g.A2 = j.at("amplitude_sphere_nm").get<double>() * 1e-9;
    g.Lx = j.at("Lx_um").get<double>() * 1e-6;
    g.Ly = j.at("Ly_um").get<double>() * 1e-6;
    g.R = j.at("sphere_radius_um").get<double>() * 1e-6;
    g.theta = j.value("theta_deg", 0.0) * M_PI / 180.0;
    g.phase = j.value("phase_rad", 0.0);
    g.roughness1 = j.value("roughness_plate_nm", 0.0) * 1e-9;
    g.roughness2 = j.value("roughness_sphere_nm", 0.0) * 1e-9;
  } catch (const nlohmann::json::exception& e) {
    throw data_error("geometry file field error in " + path + ": " + e.what());
  }
  if (g.period <= 0.0 || g.Ly <= 0.0 || g.R <= 0.0)
    throw data_error("geometry file: nonpositive dimension in " + path);
  return g;
}

}  // namespace casimir
