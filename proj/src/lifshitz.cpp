#include "casimir/lifshitz.hpp"

#include <cmath>
#include <stdexcept>

#include "casimir/constants.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

namespace {

using constants::c;
using constants::hbar;
using constants::k_B;

// Radial panel edges in t = 2 H kappa, starting at t0 = 2 H zeta / c.
std::vector<double> radial_edges(double t0) {
  return {t0, t0 + 3.0, t0 + 10.0, t0 + 30.0, t0 + 60.0};
}

struct ReflectionPair {
  double r1 = 0.0;
  double r2 = 0.0;
};

// Reflection coefficients at radial coordinate t = 2 H kappa for fixed zeta.
ReflectionPair reflections(const MaterialModel& model, double eps, double zeta, double kappa,
                           double H) {
  ReflectionPair r;
  if (model.ideal_metal) {
    r.r1 = 1.0;
    r.r2 = -1.0;
    return r;
  }
  const double k2 = kappa * kappa - (zeta / c) * (zeta / c);
  const double k = k2 > 0.0 ? std::sqrt(k2) : 0.0;
  r.r1 = fresnel_tm(eps, zeta, k);
  r.r2 = fresnel_te(eps, zeta, k);
  (void)H;
  return r;
}

// One Matsubara term of U (without the k_B T prefactor/weight):
// (1/(2 pi (2H)^2)) int t sum_p ln(1 - r_p^2 e^{-t}) dt.
double energy_term(const MaterialModel& model, double zeta, double H, int nodes) {
  const double t0 = 2.0 * H * zeta / c;
  const double eps = model.ideal_metal ? 0.0 : (zeta > 0.0 ? epsilon_iw(model, zeta) : 0.0);
  auto f = [&](double t) {
    const double kappa = t / (2.0 * H);
    ReflectionPair r;
    if (zeta == 0.0 && !model.ideal_metal) {
      const double es = epsilon_static(model);
      r.r1 = std::isinf(es) ? 1.0 : (es - 1.0) / (es + 1.0);
      r.r2 = 0.0;
    } else {
      r = reflections(model, eps, zeta, kappa, H);
    }
    const double e = std::exp(-t);
    return t * (std::log1p(-r.r1 * r.r1 * e) + std::log1p(-r.r2 * r.r2 * e));
  };
  return integrate_panels(f, radial_edges(t0), nodes) / (2.0 * M_PI * 4.0 * H * H);
}

// One Matsubara term of U' = dU/dH: (1/(2 pi (2H)^2 H)) int t^2 sum_p x/(1-x) dt.
double derivative_term(const MaterialModel& model, double zeta, double H, int nodes) {
  const double t0 = 2.0 * H * zeta / c;
  const double eps = model.ideal_metal ? 0.0 : (zeta > 0.0 ? epsilon_iw(model, zeta) : 0.0);
  auto f = [&](double t) {
    const double kappa = t / (2.0 * H);
    ReflectionPair r;
    if (zeta == 0.0 && !model.ideal_metal) {
      const double es = epsilon_static(model);
      r.r1 = std::isinf(es) ? 1.0 : (es - 1.0) / (es + 1.0);
      r.r2 = 0.0;
    } else {
      r = reflections(model, eps, zeta, kappa, H);
    }
    const double e = std::exp(-t);
    const double x1 = r.r1 * r.r1 * e, x2 = r.r2 * r.r2 * e;
    return t * t * (x1 / (1.0 - x1) + x2 / (1.0 - x2));
  };
  return integrate_panels(f, radial_edges(t0), nodes) / (2.0 * M_PI * 4.0 * H * H * H);
}

}  // namespace

WaveKinematics WaveKinematics::make(double eps, double zeta, double k) {
  WaveKinematics w;
  w.zeta = zeta;
  w.k = k;
  w.kappa = std::sqrt((zeta / c) * (zeta / c) + k * k);
  w.kappa_bar = std::sqrt(eps * (zeta / c) * (zeta / c) + k * k);
  return w;
}

double fresnel_tm(double eps, double zeta, double k) {
  if (std::isinf(eps)) return 1.0;
  const WaveKinematics w = WaveKinematics::make(eps, zeta, k);
  return (eps * w.kappa - w.kappa_bar) / (eps * w.kappa + w.kappa_bar);
}

double fresnel_te(double eps, double zeta, double k) {
  if (std::isinf(eps)) return -1.0;
  const WaveKinematics w = WaveKinematics::make(eps, zeta, k);
  return (w.kappa - w.kappa_bar) / (w.kappa + w.kappa_bar);
}

double plate_energy(const MaterialModel& model, double T, double H, const LifshitzOptions& opts) {
  if (H <= 0.0) throw std::domain_error("plate_energy: H must be > 0");
  if (model.is_vacuum()) return 0.0;
  const MatsubaraGrid grid = matsubara_grid(T, opts.matsubara_tol, H);
  double sum = 0.0;
  for (std::size_t n = 0; n < grid.zeta.size(); ++n)
    sum += grid.weight(n) * energy_term(model, grid.zeta[n], H, opts.radial_nodes);
  return k_B * T * sum;
}

double plate_energy_derivative(const MaterialModel& model, double T, double H,
                               const LifshitzOptions& opts) {
  if (H <= 0.0) throw std::domain_error("plate_energy_derivative: H must be > 0");
  if (model.is_vacuum()) return 0.0;
  const MatsubaraGrid grid = matsubara_grid(T, opts.matsubara_tol, H);
  double sum = 0.0;
  for (std::size_t n = 0; n < grid.zeta.size(); ++n)
    sum += grid.weight(n) * derivative_term(model, grid.zeta[n], H, opts.radial_nodes);
  return k_B * T * sum;
}

double plate_energy_T0(const MaterialModel& model, double H, const LifshitzOptions& opts) {
  if (H <= 0.0) throw std::domain_error("plate_energy_T0: H must be > 0");
  if (model.is_vacuum()) return 0.0;
  // y = 2 H zeta / c; U = (hbar c / (4 pi H)) int dy [energy_term at zeta(y)]
  auto f = [&](double y) {
    const double zeta = y * c / (2.0 * H);
    return energy_term(model, zeta, H, opts.radial_nodes);
  };
  const std::vector<double> edges = {0.0, 3.0, 10.0, 30.0, 60.0};
  return hbar * c / (4.0 * M_PI * H) * integrate_panels(f, edges, opts.radial_nodes);
}

double plate_energy_T0_derivative(const MaterialModel& model, double H,
                                  const LifshitzOptions& opts) {
  if (H <= 0.0) throw std::domain_error("plate_energy_T0_derivative: H must be > 0");
  if (model.is_vacuum()) return 0.0;
  auto f = [&](double y) {
    const double zeta = y * c / (2.0 * H);
    return derivative_term(model, zeta, H, opts.radial_nodes);
  };
  const std::vector<double> edges = {0.0, 3.0, 10.0, 30.0, 60.0};
  return hbar * c / (4.0 * M_PI * H) * integrate_panels(f, edges, opts.radial_nodes);
}

}  // namespace casimir
