#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "casimir/constants.hpp"
#include "casimir/errors.hpp"
#include "casimir/gradient_kernel.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/rayleigh.hpp"

using namespace casimir;
namespace k = casimir::constants;
using Eigen::Vector2d;

namespace {
MaterialModel gold() { return MaterialModel::from_json_file("data/gold.json"); }

// Independent re-typed copies of the printed second-order expressions
// (different grouping/pow usage), for the double-entry transcription oracle.
double b2_tm_retyped(double eps, double zeta, const Vector2d& kv, const Vector2d& kpv) {
  const double c = k::c;
  const double kk = kv.norm(), kp = kpv.norm();
  const double kap = std::sqrt(std::pow(zeta / c, 2) + kk * kk);
  const double kapb = std::sqrt(eps * std::pow(zeta / c, 2) + kk * kk);
  const double kapp = std::sqrt(std::pow(zeta / c, 2) + kp * kp);
  const double kappb = std::sqrt(eps * std::pow(zeta / c, 2) + kp * kp);
  const double kdkp = kv.dot(kpv);
  double t1 = (eps - 1.0) * (eps * kk * kk * kp * kp - kapb * kapb * kdkp * kdkp / (kk * kk)) /
              (eps * kapp + kappb);
  double t2 = 2.0 * eps * kap * kdkp * (kapp + kappb) / (eps * kapp + kappb);
  double t3 = eps * kapb * std::pow(zeta / c, 2);
  double t4 = kapb * (kapp - kappb);
  return (2.0 * (eps - 1.0) / std::pow(eps * kap + kapb, 2)) * (t1 + t2 + t3 + t4);
}

double b2_te_retyped(double eps, double zeta, const Vector2d& kv, const Vector2d& kpv) {
  const double c = k::c;
  const double kk = kv.norm(), kp = kpv.norm();
  const double kap = std::sqrt(std::pow(zeta / c, 2) + kk * kk);
  const double kapb = std::sqrt(eps * std::pow(zeta / c, 2) + kk * kk);
  const double kapp = std::sqrt(std::pow(zeta / c, 2) + kp * kp);
  const double kappb = std::sqrt(eps * std::pow(zeta / c, 2) + kp * kp);
  const double kdkp = kv.dot(kpv);
  const double inner =
      (eps - 1.0) * (kdkp * kdkp / (kk * kk) - kp * kp) / (eps * kapp + kappb) + kapb - kappb +
      kapp;
  return (2.0 * (eps - 1.0) * std::pow(zeta / c, 2) / std::pow(kap + kapb, 2)) * inner;
}
}  // namespace

TEST_CASE("solver flat order reproduces Fresnel") {
  const double zeta = 5.0 * 2.0 * M_PI * k::k_B * 300.0 / k::hbar;
  const double eps = epsilon_iw(gold(), zeta);
  const Vector2d kv(5e6, 3e6);
  const ScatterAmplitudes s =
      scatter_corrugated(eps, zeta, kv, Vector2d(1.0, 0.0));
  CHECK(s.r_flat(0).real() == doctest::Approx(fresnel_te(eps, zeta, kv.norm())).epsilon(1e-10));
  CHECK(s.r_flat(1).real() == doctest::Approx(fresnel_tm(eps, zeta, kv.norm())).epsilon(1e-10));
  CHECK(std::abs(s.r_flat(0).imag()) < 1e-12);
  CHECK(std::abs(s.r_flat(1).imag()) < 1e-12);
}

TEST_CASE("solver translation identity: uniform shift matches H-expansion") {
  // As P -> 0 the corrugation becomes a uniform height shift of 2 (u=v=1),
  // so the channel-summed second order must reproduce (1/2) U'' of the flat
  // energy. This is checked end-to-end through kernel_G below; here check the
  // diagonal amplitude scale against the perfect-coincidence value -2 kap^2 r
  // distributed over the uv channel (factor 2 of h^2 = 4 cos^2).
  const double zeta = 3.0 * 2.0 * M_PI * k::k_B * 300.0 / k::hbar;
  const double eps = epsilon_iw(gold(), zeta);
  const Vector2d kv(6e6, 2e6);
  const ScatterAmplitudes s = scatter_corrugated(eps, zeta, kv, Vector2d(10.0, 0.0));
  const double kap = std::sqrt((zeta / k::c) * (zeta / k::c) + kv.squaredNorm());
  // R2 diag carries the uv cross term: coefficient 2 relative to a unit mode
  for (int p = 0; p < 2; ++p) {
    const double expected = -2.0 * kap * kap * s.r_flat(p).real() * 2.0;
    // half of the shift-squared weight sits in the +-2P channels at finite P;
    // the identity closes with the round-trip terms, so only the order of
    // magnitude and sign pattern are checked here
    CHECK(std::abs(s.R2(p, p).real()) > 0.1 * std::abs(expected));
    CHECK(std::abs(s.R2(p, p).real()) < 2.0 * std::abs(expected));
  }
}

TEST_CASE("d1 matrix entries and limits") {
  const double zeta = 1.0 * k::eV_over_hbar, kk = zeta / k::c;
  CHECK(d1_matrix(1.0, zeta, kk).norm() == doctest::Approx(0.0));
  const double eps = 1e6;
  const Eigen::Matrix2d d = d1_matrix(eps, zeta, kk);
  const double kap = std::sqrt((zeta / k::c) * (zeta / k::c) + kk * kk);
  const double kapb = std::sqrt(eps * (zeta / k::c) * (zeta / k::c) + kk * kk);
  CHECK(d(0, 0) == doctest::Approx(std::sqrt(eps - 1.0) * kapb / (eps * kap + kapb)).epsilon(1e-12));
  CHECK(d(1, 1) == doctest::Approx(std::sqrt(eps - 1.0) * (zeta / k::c) / (kap + kapb)).epsilon(1e-12));
  CHECK(d(0, 1) == 0.0);
  CHECK(d1_matrix(eps, 0.0, kk)(1, 1) == 0.0);  // TE entry carries zeta/c
}

TEST_CASE("b_matrix structure") {
  const double zeta = 0.8 * k::eV_over_hbar;
  const double eps = epsilon_iw(gold(), zeta);
  const Vector2d kv(4e6, 1e6);
  SUBCASE("coincident wavevectors: off-diagonals vanish, diagonal equals r_p") {
    const Eigen::Matrix2d B = b_matrix(eps, zeta, kv, kv);
    CHECK(B(0, 1) == doctest::Approx(0.0));
    CHECK(B(1, 0) == doctest::Approx(0.0));
    // the first-order kernel at coincidence reduces to the Fresnel amplitude
    CHECK(B(0, 0) == doctest::Approx(fresnel_tm(eps, zeta, kv.norm())).epsilon(1e-10));
    CHECK(B(1, 1) == doctest::Approx(fresnel_te(eps, zeta, kv.norm())).epsilon(1e-10));
  }
  SUBCASE("vacuum gives zero") {
    CHECK(b_matrix(1.0, zeta, kv, Vector2d(1e6, -2e6)).norm() == doctest::Approx(0.0));
  }
  SUBCASE("zero wavevector rejected") {
    CHECK_THROWS_AS(b_matrix(eps, zeta, Vector2d(0, 0), kv), std::domain_error);
  }
  SUBCASE("symmetry pattern under exchange on random samples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1e7, 1e7);
    for (int i = 0; i < 100; ++i) {
      const Vector2d a(u(rng), u(rng)), b(u(rng), u(rng));
      if (a.norm() < 1e3 || b.norm() < 1e3) continue;
      const Eigen::Matrix2d Bab = b_matrix(eps, zeta, a, b);
      const Eigen::Matrix2d Bba = b_matrix(eps, zeta, b, a);
      CHECK(Bab(0, 0) == doctest::Approx(Bba(0, 0)).epsilon(1e-10));
      CHECK(Bab(1, 1) == doctest::Approx(Bba(1, 1)).epsilon(1e-10));
      CHECK(Bab(0, 1) == doctest::Approx(-Bba(1, 0)).epsilon(1e-10));
    }
  }
}

TEST_CASE("printed second-order amplitudes: transcription oracle") {
  const double zeta = 1.3 * k::eV_over_hbar;
  const double eps = epsilon_iw(gold(), zeta);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1e5, 2e7);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (int i = 0; i < 50; ++i) {
    const double a1 = ang(rng), a2 = ang(rng);
    const Vector2d kv(u(rng) * std::cos(a1), u(rng) * std::sin(a1));
    const Vector2d kpv(u(rng) * std::cos(a2), u(rng) * std::sin(a2));
    CHECK(b2_tm(eps, zeta, kv, kpv) ==
          doctest::Approx(b2_tm_retyped(eps, zeta, kv, kpv)).epsilon(1e-12));
    CHECK(b2_te(eps, zeta, kv, kpv) ==
          doctest::Approx(b2_te_retyped(eps, zeta, kv, kpv)).epsilon(1e-12));
  }
  // vacuum zero and the printed TE bracket's k'=k first-term cancellation
  const Vector2d kv(3e6, 4e6);
  CHECK(b2_tm(1.0, zeta, kv, kv) == doctest::Approx(0.0));
  CHECK(b2_te(1.0, zeta, kv, kv) == doctest::Approx(0.0));
  const double kap = std::sqrt((zeta / k::c) * (zeta / k::c) + kv.squaredNorm());
  // printed TE form satisfies the coincidence identity B2_22(k,k;k) = -2 kap r2
  CHECK(b2_te(eps, zeta, kv, kv) ==
        doctest::Approx(-2.0 * kap * fresnel_te(eps, zeta, kv.norm())).epsilon(1e-10));
}

TEST_CASE("kernel flat limit: G(0) equals U''/2 for gold at 300 K" * doctest::timeout(600)) {
  const MaterialModel m = gold();
  const double H = 130e-9, dH = 1e-9;
  const double Upp = (plate_energy(m, 300.0, H + dH) - 2.0 * plate_energy(m, 300.0, H) +
                      plate_energy(m, 300.0, H - dH)) /
                     (dH * dH);
  const double G0 = kernel_G(m, 300.0, H, Vector2d(0.0, 0.0));
  CHECK(G0 / (0.5 * Upp) == doctest::Approx(1.0).epsilon(5e-4));
}

TEST_CASE("printed (1 + ...) denominators fail the flat-limit oracle") {
  const MaterialModel m = gold();
  const double H = 130e-9, dH = 1e-9;
  const double Upp = (plate_energy(m, 300.0, H + dH) - 2.0 * plate_energy(m, 300.0, H) +
                      plate_energy(m, 300.0, H - dH)) /
                     (dH * dH);
  KernelOptions opts;
  opts.convention = KernelConvention::printed_plus;
  const double G0 = kernel_G(m, 300.0, H, Vector2d(0.0, 0.0), opts);
  CHECK(std::abs(G0 / (0.5 * Upp) - 1.0) > 0.05);
}

TEST_CASE("kernel parity and vacuum") {
  const MaterialModel m = gold();
  MaterialModel vac;
  CHECK(kernel_G(vac, 300.0, 130e-9, Vector2d(1e6, 0.0)) == 0.0);
  const double H = 150e-9;
  const double Gp = kernel_G(m, 300.0, H, Vector2d(0.1 / H, 0.0));
  const double Gm = kernel_G(m, 300.0, H, Vector2d(-0.1 / H, 0.0));
  CHECK(Gp == doctest::Approx(Gm).epsilon(1e-12));
}

TEST_CASE("alpha: quadratic-fit oracle and step independence" * doctest::timeout(900)) {
  const MaterialModel m = gold();
  const double H = 130e-9;
  const AlphaPoint a = alpha(m, 300.0, H);
  CHECK(a.alpha > 0.0);

  // least-squares fit of G over |k| H in [0, 0.2] to c0 + c2 k^2 + c4 k^4
  const double G0 = kernel_G(m, 300.0, H, Vector2d(0.0, 0.0));
  std::vector<double> Ps = {0.05 / H, 0.1 / H, 0.15 / H, 0.2 / H};
  Eigen::MatrixXd A(4, 2);
  Eigen::VectorXd y(4);
  for (int i = 0; i < 4; ++i) {
    const double P = Ps[static_cast<std::size_t>(i)];
    A(i, 0) = P * P;
    A(i, 1) = P * P * P * P;
    y(i) = kernel_G(m, 300.0, H, Vector2d(P, 0.0)) - G0;
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  CHECK(a.alpha == doctest::Approx(coef(0)).epsilon(1e-2));

  // the same Richardson value from halved steps (0.05/H, 0.1/H)
  const double P1 = 0.05 / H;
  const double G1 = kernel_G(m, 300.0, H, Vector2d(P1, 0.0));
  const double G2 = kernel_G(m, 300.0, H, Vector2d(2.0 * P1, 0.0));
  const double a_half = (16.0 * (G1 - G0) - (G2 - G0)) / (12.0 * P1 * P1);
  CHECK(a_half == doctest::Approx(a.alpha).epsilon(2e-3));
}

TEST_CASE("alpha vacuum is zero") {
  MaterialModel vac;
  CHECK(alpha(vac, 300.0, 130e-9).alpha == 0.0);
}
