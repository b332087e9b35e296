#pragma once

#include <vector>

namespace casimir {

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
  explicit GaussLegendre(int n);

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * f(mid + half * x[i]);
    return half * s;
  }
};

// Shared cache; nodes are immutable after construction.
const GaussLegendre& gauss_legendre(int n);

// Integrate f over consecutive panels [edges[0], edges[1]], ... with n nodes each.
template <class F>
double integrate_panels(F&& f, const std::vector<double>& edges, int n) {
  const GaussLegendre& g = gauss_legendre(n);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) s += g.integrate(f, edges[i], edges[i + 1]);
  return s;
}

}  // namespace casimir
