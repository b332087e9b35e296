#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "casimir/corrugation.hpp"
#include "casimir/errors.hpp"

using namespace casimir;

namespace {

CorrugationGeometry base_geometry() {
  CorrugationGeometry g;
  g.period = 570.5e-9;
  g.A1 = 40.2e-9;
  g.A2 = 14.6e-9;
  g.Lx = 14e-6;
  g.Ly = 14e-6;
  g.R = 99.6e-6;
  return g;
}

// Shared ideal-metal T=0 table, coarse enough to build once per run.
const PlateFunctionTable& ideal_table() {
  static PlateFunctionTable t = [] {
    MaterialModel m;
    m.ideal_metal = true;
    PlateTableOptions o;
    o.nodes = 150;
    o.alpha_nodes = 10;
    return PlateFunctionTable::build(m, -1.0, 70e-9, 200e-9, o);
  }();
  return t;
}

}  // namespace

TEST_CASE("local separation profile") {
  CorrugationGeometry g = base_geometry();
  const double z = 130e-9;
  // conformal imprint at the origin: gap modulated by A1 - A2
  CHECK(local_separation(g, z, 0.0, 0.0) == doctest::Approx(z + g.A1 - g.A2).epsilon(1e-14));
  // periodic along x
  CHECK(local_separation(g, z, 0.3e-9, 2e-6) ==
        doctest::Approx(local_separation(g, z, 0.3e-9 + g.period, 2e-6)).epsilon(1e-14));
  // theta = 0: no y dependence; theta != 0 shifts the sphere profile with y
  CHECK(local_separation(g, z, 1e-7, -5e-6) ==
        doctest::Approx(local_separation(g, z, 1e-7, 5e-6)).epsilon(1e-14));
  g.theta = 2.4 * M_PI / 180.0;
  CHECK(std::abs(local_separation(g, z, 1e-7, -5e-6) - local_separation(g, z, 1e-7, 5e-6)) >
        1e-9);
  // half a period out of registry: modulation A1 + A2 at the origin
  g.theta = 0.0;
  g.phase = 0.0;
  CorrugationGeometry shifted = g;
  const double x_half = g.period / 2.0;
  CHECK(local_separation(shifted, z, x_half, 0.0) ==
        doctest::Approx(z - (g.A1 - g.A2)).epsilon(1e-12));
}

TEST_CASE("geometry file round trip") {
  const CorrugationGeometry g = CorrugationGeometry::from_json_file("data/geometry.json");
  CHECK(g.period == doctest::Approx(570.5e-9));
  CHECK(g.A1 == doctest::Approx(40.2e-9));
  CHECK(g.A2 == doctest::Approx(14.6e-9));
  CHECK(g.Lx == doctest::Approx(14e-6));
  CHECK(g.Ly == doctest::Approx(14e-6));
  CHECK(g.R == doctest::Approx(99.6e-6));
  CHECK(g.theta == 0.0);
  CHECK_THROWS_AS(CorrugationGeometry::from_json_file("data/no_such_file.json"), data_error);
}

TEST_CASE("flat limit reduces to the plate energy") {
  CorrugationGeometry g = base_geometry();
  g.A1 = g.A2 = 0.0;
  const PlateFunctionTable& t = ideal_table();
  const double z = 130e-9;
  CHECK(energy_pfa(g, t, z, 0.0) == doctest::Approx(t.U(z)).epsilon(1e-12));
  CHECK(energy_derivative_expansion(g, t, z, 0.0) == doctest::Approx(t.U(z)).epsilon(1e-12));
  CHECK(force_sphere(g, t, z, 0.0, ForceMethod::DER_IDEAL) ==
        doctest::Approx(2.0 * M_PI * g.R * t.U(z)).epsilon(1e-12));
}

TEST_CASE("small-amplitude Taylor expansion of the cell average") {
  // single corrugation, A2 = 0: <U(z + A1 cos)> = U(z) + (A1^2/4) U''(z) + O(A1^4)
  CorrugationGeometry g = base_geometry();
  g.A1 = 2e-9;
  g.A2 = 0.0;
  const PlateFunctionTable& t = ideal_table();
  const double z = 130e-9, h = 0.5e-9;
  const double upp = (t.Uprime(z + h) - t.Uprime(z - h)) / (2.0 * h);
  const double correction = energy_pfa(g, t, z, 0.0) - t.U(z);
  CHECK(correction == doctest::Approx(g.A1 * g.A1 / 4.0 * upp).epsilon(1e-2));
}

TEST_CASE("gradient term matches the alpha coefficient for small amplitude") {
  // A2 = 0: <|grad H|^2> = A1^2 q^2 / 2 and the cross-gradient term vanishes,
  // so DER - PFA ~= alpha(z) A1^2 q^2 / 2 to leading order in A1.
  CorrugationGeometry g = base_geometry();
  g.A1 = 2e-9;
  g.A2 = 0.0;
  const PlateFunctionTable& t = ideal_table();
  const double z = 130e-9, q = 2.0 * M_PI / g.period;
  const double diff =
      energy_derivative_expansion(g, t, z, 0.0) - energy_pfa(g, t, z, 0.0);
  CHECK(diff == doctest::Approx(t.alpha(z) * g.A1 * g.A1 * q * q / 2.0).epsilon(2e-2));
}

TEST_CASE("ideal-metal alpha regression value and sign convention") {
  // default convention flips the sign of the positive physical curvature
  CHECK(ideal_table().alpha(130e-9) == doctest::Approx(-6.088213e-8).epsilon(1e-4));
}

TEST_CASE("infinite-plate average is independent of the crossing angle") {
  const CorrugationGeometry g = base_geometry();
  const PlateFunctionTable& t = ideal_table();
  CellQuadrature q;
  q.infinite_plates = true;
  const double z = 132e-9;
  const double e0 = energy_derivative_expansion(g, t, z, 0.0, q);
  for (double deg : {1.2, 1.8, 2.4}) {
    const double e = energy_derivative_expansion(g, t, z, deg * M_PI / 180.0, q);
    CHECK(e == doctest::Approx(e0).epsilon(1e-6));
  }
}

TEST_CASE("finite and infinite averages coincide at zero angle") {
  const CorrugationGeometry g = base_geometry();
  const PlateFunctionTable& t = ideal_table();
  CellQuadrature qi;
  qi.infinite_plates = true;
  const double z = 130e-9;
  CHECK(energy_derivative_expansion(g, t, z, 0.0) ==
        doctest::Approx(energy_derivative_expansion(g, t, z, 0.0, qi)).epsilon(1e-10));
}

TEST_CASE("registry phase drops out of the periodic average at zero angle") {
  CorrugationGeometry g = base_geometry();
  const PlateFunctionTable& t = ideal_table();
  const double z = 130e-9;
  const double e0 = energy_pfa(g, t, z, 0.0);
  g.phase = M_PI / 3.0;
  CHECK(energy_pfa(g, t, z, 0.0) == doctest::Approx(e0).epsilon(1e-12));
}

TEST_CASE("quadrature convergence") {
  const CorrugationGeometry g = base_geometry();
  const PlateFunctionTable& t = ideal_table();
  CellQuadrature coarse;
  coarse.x_nodes = 64;
  coarse.y_nodes = 64;
  const double z = 130e-9, th = 2.4 * M_PI / 180.0;
  const double ec = energy_derivative_expansion(g, t, z, th, coarse);
  const double ef = energy_derivative_expansion(g, t, z, th);
  CHECK(ec == doctest::Approx(ef).epsilon(1e-7));
}

TEST_CASE("force is attractive and weakens with separation") {
  const CorrugationGeometry g = base_geometry();
  const PlateFunctionTable& t = ideal_table();
  const double f1 = force_sphere(g, t, 128e-9, 0.0, ForceMethod::DER_IDEAL);
  const double f2 = force_sphere(g, t, 140e-9, 0.0, ForceMethod::DER_IDEAL);
  CHECK(f1 < 0.0);
  CHECK(f2 < 0.0);
  CHECK(std::abs(f1) > std::abs(f2));
}

TEST_CASE("force curves and comparison rows") {
  const CorrugationGeometry g = base_geometry();
  const PlateFunctionTable& t = ideal_table();
  const std::vector<double> zs = {128e-9, 132e-9, 140e-9};
  const ForceCurve a = force_curve(g, t, zs, 0.0, ForceMethod::DER_IDEAL);
  const ForceCurve b = force_curve(g, t, zs, 2.4 * M_PI / 180.0, ForceMethod::DER_IDEAL);
  REQUIRE(a.points.size() == 3);
  CHECK(a.points[1].z == doctest::Approx(132e-9));
  CHECK(to_string(a.points[0].method) == "DER_IDEAL");
  const auto rows = comparison_report(a, b);
  REQUIRE(rows.size() == 3);
  for (const ComparisonRow& r : rows) {
    CHECK(r.ratio == doctest::Approx(1.0).epsilon(0.2));
    CHECK(r.difference != 0.0);
  }
  ForceCurve c = a;
  c.points.pop_back();
  CHECK_THROWS_AS(comparison_report(a, c), data_error);
}

TEST_CASE("table range violations are rejected") {
  const CorrugationGeometry g = base_geometry();
  const PlateFunctionTable& t = ideal_table();
  // z + A1 + A2 exceeds the tabulated range
  CHECK_THROWS_AS(energy_pfa(g, t, 180e-9, 0.0), std::exception);
}
