#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "casimir/constants.hpp"
#include "casimir/material.hpp"

using namespace casimir;
namespace k = casimir::constants;

namespace {
MaterialModel drude_gold() {
  MaterialModel m;
  m.plasma_frequency = 9.0 * k::eV_over_hbar;
  m.relaxation_frequency = 0.035 * k::eV_over_hbar;
  return m;
}
}  // namespace

TEST_CASE("Drude permittivity at 1 eV") {
  // 1 + 81/(1 * 1.035) = 79.2609
  const double eps = epsilon_iw(drude_gold(), 1.0 * k::eV_over_hbar);
  CHECK(eps == doctest::Approx(79.26086956521739).epsilon(1e-10));
}

TEST_CASE("Drude permittivity at first Matsubara frequency, 300 K") {
  const double zeta1 = 2.0 * M_PI * k::k_B * 300.0 / k::hbar;
  CHECK(zeta1 == doctest::Approx(2.4677902551e14).epsilon(1e-9));
  const double eps = epsilon_iw(drude_gold(), zeta1);
  CHECK(eps == doctest::Approx(2526.7564496755).epsilon(1e-9));
}

TEST_CASE("high-frequency transparency") {
  MaterialModel m = drude_gold();
  m.oscillators.push_back({7.091 * k::eV_over_hbar * k::eV_over_hbar, 3.05 * k::eV_over_hbar,
                           0.75 * k::eV_over_hbar});
  CHECK(epsilon_iw(m, 1e25) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("permittivity is >= 1 and strictly decreasing") {
  const MaterialModel m = MaterialModel::from_json_file("data/gold.json");
  double prev = epsilon_iw(m, 1e12);
  for (double zeta = 2e12; zeta < 1e18; zeta *= 1.7) {
    const double e = epsilon_iw(m, zeta);
    CHECK(e >= 1.0);
    CHECK(e < prev);
    prev = e;
  }
}

TEST_CASE("plasma limit: zeta^2 (eps - 1) -> wp^2 for f_i = 0, gamma -> 0") {
  MaterialModel m;
  m.plasma_frequency = 9.0 * k::eV_over_hbar;
  m.relaxation_frequency = 0.0;
  const double zeta = 3.7e15;
  CHECK(zeta * zeta * (epsilon_iw(m, zeta) - 1.0) ==
        doctest::Approx(m.plasma_frequency * m.plasma_frequency).epsilon(1e-12));
}

TEST_CASE("zeta = 0 returns the divergent marker; negative zeta rejected") {
  CHECK(std::isinf(epsilon_iw(drude_gold(), 0.0)));
  CHECK_THROWS_AS(epsilon_iw(drude_gold(), -1.0), std::domain_error);
}

TEST_CASE("static permittivity limits") {
  CHECK(std::isinf(epsilon_static(drude_gold())));
  MaterialModel osc_only;
  osc_only.oscillators.push_back({4.0, 2.0, 0.1});
  CHECK(epsilon_static(osc_only) == doctest::Approx(2.0));
  MaterialModel vac;
  CHECK(vac.is_vacuum());
  CHECK(epsilon_static(vac) == doctest::Approx(1.0));
}

TEST_CASE("Matsubara grid structure") {
  const MatsubaraGrid g = matsubara_grid(300.0, 1e-6, 127e-9);
  const double zeta1 = 2.0 * M_PI * k::k_B * 300.0 / k::hbar;
  REQUIRE(g.zeta.size() >= 3);
  CHECK(g.zeta[0] == 0.0);
  CHECK(g.weight(0) == 0.5);
  CHECK(g.weight(1) == 1.0);
  CHECK(g.zeta[1] == doctest::Approx(zeta1).epsilon(1e-14));
  for (std::size_t n = 0; n + 1 < g.zeta.size(); ++n)
    CHECK(g.zeta[n + 1] - g.zeta[n] == doctest::Approx(zeta1).epsilon(1e-12));
  // truncation bound actually reached at z_min
  const double tail = std::exp(-2.0 * 127e-9 * g.zeta.back() / k::c);
  CHECK(tail < 1e-6);
}

TEST_CASE("Matsubara grid rejects invalid input") {
  CHECK_THROWS_AS(matsubara_grid(0.0, 1e-6, 1e-7), std::domain_error);
  CHECK_THROWS_AS(matsubara_grid(-5.0, 1e-6, 1e-7), std::domain_error);
  CHECK_THROWS_AS(matsubara_grid(300.0, 1e-6, 0.0), std::domain_error);
  CHECK_THROWS_AS(matsubara_grid(300.0, 2.0, 1e-7), std::domain_error);
}

TEST_CASE("gold material file round trip") {
  const MaterialModel m = MaterialModel::from_json_file("data/gold.json");
  CHECK_FALSE(m.ideal_metal);
  CHECK(m.plasma_frequency == doctest::Approx(9.0 * k::eV_over_hbar));
  CHECK(m.relaxation_frequency == doctest::Approx(0.035 * k::eV_over_hbar));
  REQUIRE(m.oscillators.size() == 6);
  // full model at first Matsubara frequency (pinned by direct arithmetic)
  const double zeta1 = 2.0 * M_PI * k::k_B * 300.0 / k::hbar;
  CHECK(epsilon_iw(m, zeta1) == doctest::Approx(2532.9940599066).epsilon(1e-9));
  CHECK(epsilon_iw(m, 1.0 * k::eV_over_hbar) == doctest::Approx(84.94324486279).epsilon(1e-9));
}

TEST_CASE("ideal metal flag") {
  const MaterialModel m = MaterialModel::from_json_file("data/ideal.json");
  CHECK(m.ideal_metal);
  CHECK_THROWS_AS(epsilon_iw(m, 1e15), std::logic_error);
}

TEST_CASE("missing material file") {
  CHECK_THROWS_AS(MaterialModel::from_json_file("data/nope.json"), std::runtime_error);
}
