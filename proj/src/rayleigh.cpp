#include "casimir/rayleigh.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "casimir/constants.hpp"

namespace casimir {

namespace {

using cd = std::complex<double>;
using Eigen::Matrix2cd;
using Eigen::Matrix4cd;
using Eigen::Vector2d;
using Eigen::Vector4cd;
using V3 = Eigen::Vector3cd;

// Branch with nonnegative imaginary part (decaying upward in vacuum).
cd pick_up(cd w) { return w.imag() < 0.0 ? -w : w; }

// Plain complex cross product (Eigen's cross() conjugates complex operands).
V3 cross3(const V3& a, const V3& b) {
  return V3(a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
            a.x() * b.y() - a.y() * b.x());
}

struct ModeFields {
  V3 E, H;
};

// Plane-wave mode fields for transverse wavevector kt, vertical wavenumber kz,
// refractive index n, at frequency om = i zeta / c (wavevector units, c = 1).
ModeFields mode_fields(const Vector2d& kt, cd kz, cd n, cd om, bool p_pol) {
  const double kn = kt.norm();
  Vector2d kh = kn > 0.0 ? Vector2d(kt / kn) : Vector2d(1.0, 0.0);
  V3 es(cd(-kh.y()), cd(kh.x()), cd(0.0));
  V3 K(cd(kt.x()), cd(kt.y()), kz);
  ModeFields m;
  m.E = p_pol ? V3(cross3(K, es) / (n * om)) : es;
  m.H = cross3(K, m.E) / om;
  return m;
}

struct Mode {
  int order;    // perturbative order of the amplitude
  int channel;  // diffraction channel in units of P
  cd kz;
  ModeFields f;
  cd amp;
  double sign;  // +1 vacuum side, -1 medium side in the continuity rows
};

// Coefficients of (e^{iPr} + e^{-iPr})^j by channel shift, j <= 2.
const std::array<std::array<double, 5>, 3> kHPow = {{
    // shift: -2 -1 0 +1 +2
    {{0, 0, 1, 0, 0}},  // j = 0
    {{0, 1, 0, 1, 0}},  // j = 1
    {{1, 0, 2, 0, 1}},  // j = 2
}};

double hpow(int j, int shift) {
  if (shift < -2 || shift > 2) return 0.0;
  return kHPow[static_cast<std::size_t>(j)][static_cast<std::size_t>(shift + 2)];
}

cd ipow_kz(cd kz, int j) {
  cd r(1.0, 0.0);
  const cd ikz = cd(0.0, 1.0) * kz;
  for (int i = 0; i < j; ++i) r *= ikz;
  return r;
}

double factorial(int j) { return j <= 1 ? 1.0 : (j == 2 ? 2.0 : 6.0); }

}  // namespace

ScatterAmplitudes scatter_corrugated(double eps, double zeta, const Vector2d& k,
                                     const Vector2d& P, bool with_second_order) {
  const cd om = cd(0.0, zeta / constants::c);
  const cd n2 = std::sqrt(cd(eps, 0.0));

  std::array<Vector2d, 3> K;       // channels -1, 0, +1
  std::array<cd, 3> wv, wm;
  for (int m = -1; m <= 1; ++m) {
    const Vector2d km = k + static_cast<double>(m) * P;
    K[static_cast<std::size_t>(m + 1)] = km;
    wv[static_cast<std::size_t>(m + 1)] = pick_up(std::sqrt(om * om - cd(km.squaredNorm(), 0.0)));
    wm[static_cast<std::size_t>(m + 1)] =
        -pick_up(std::sqrt(cd(eps, 0.0) * om * om - cd(km.squaredNorm(), 0.0)));
  }

  struct BasisMode {
    cd kz;
    ModeFields f;
    double sign;
  };
  std::array<std::array<BasisMode, 4>, 3> basis;  // [channel][vac s, vac p, med s, med p]
  for (int m = 0; m < 3; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    basis[mi][0] = {wv[mi], mode_fields(K[mi], wv[mi], cd(1.0, 0.0), om, false), +1.0};
    basis[mi][1] = {wv[mi], mode_fields(K[mi], wv[mi], cd(1.0, 0.0), om, true), +1.0};
    basis[mi][2] = {wm[mi], mode_fields(K[mi], wm[mi], n2, om, false), -1.0};
    basis[mi][3] = {wm[mi], mode_fields(K[mi], wm[mi], n2, om, true), -1.0};
  }

  // grad h per profile mode e^{+-iPr}
  const std::array<V3, 2> grad_h = {V3(cd(0.0, P.x()), cd(0.0, P.y()), cd(0.0, 0.0)),
                                    V3(cd(0.0, -P.x()), cd(0.0, -P.y()), cd(0.0, 0.0))};
  const std::array<int, 2> grad_shift = {+1, -1};

  auto colmat = [&](int channel) {
    Matrix4cd A;
    const auto& b = basis[static_cast<std::size_t>(channel + 1)];
    for (int i = 0; i < 4; ++i) {
      const auto bi = static_cast<std::size_t>(i);
      A(0, i) = b[bi].sign * b[bi].f.E.x();
      A(1, i) = b[bi].sign * b[bi].f.E.y();
      A(2, i) = b[bi].sign * b[bi].f.H.x();
      A(3, i) = b[bi].sign * b[bi].f.H.y();
    }
    return A;
  };

  // Continuity residual (Ex, Ey, Hx, Hy rows) of total order `ord` in channel q
  // from the already-known modes; expansion term order = amp order + power of h
  // (+1 for the grad-h rotation of the normal components).
  auto contrib = [&](const std::vector<Mode>& mods, int q, int ord) {
    Vector4cd R = Vector4cd::Zero();
    for (const Mode& mo : mods) {
      const int j = ord - mo.order;
      if (j >= 0 && j <= 2) {
        const double hp = hpow(j, q - mo.channel);
        if (hp != 0.0) {
          const cd cf = mo.amp * mo.sign * ipow_kz(mo.kz, j) / factorial(j) * hp;
          R(0) += cf * mo.f.E.x();
          R(1) += cf * mo.f.E.y();
          R(2) += cf * mo.f.H.x();
          R(3) += cf * mo.f.H.y();
        }
      }
      const int j2 = ord - mo.order - 1;
      if (j2 >= 0 && j2 <= 2) {
        for (int g = 0; g < 2; ++g) {
          const auto gi = static_cast<std::size_t>(g);
          const double hp = hpow(j2, q - mo.channel - grad_shift[gi]);
          if (hp != 0.0) {
            const cd cf = mo.amp * mo.sign * ipow_kz(mo.kz, j2) / factorial(j2) * hp;
            R(0) += cf * grad_h[gi].x() * mo.f.E.z();
            R(1) += cf * grad_h[gi].y() * mo.f.E.z();
            R(2) += cf * grad_h[gi].x() * mo.f.H.z();
            R(3) += cf * grad_h[gi].y() * mo.f.H.z();
          }
        }
      }
    }
    return R;
  };

  const Matrix4cd A0 = colmat(0);
  const Eigen::PartialPivLU<Matrix4cd> lu0(A0);
  Eigen::PartialPivLU<Matrix4cd> lup(colmat(+1));
  Eigen::PartialPivLU<Matrix4cd> lum(colmat(-1));

  ScatterAmplitudes out;
  out.R1_plus.setZero();
  out.R1_minus.setZero();
  out.R2.setZero();

  for (int jp = 0; jp < 2; ++jp) {
    std::vector<Mode> mods;
    mods.reserve(13);
    Mode inc;
    inc.order = 0;
    inc.channel = 0;
    inc.kz = -wv[1];
    inc.f = mode_fields(K[1], -wv[1], cd(1.0, 0.0), om, jp == 1);
    inc.amp = cd(1.0, 0.0);
    inc.sign = +1.0;
    mods.push_back(inc);

    const Vector4cd x0 = lu0.solve(-contrib(mods, 0, 0));
    out.r_flat(jp) = x0(jp);
    for (int i = 0; i < 4; ++i) {
      const auto& b = basis[1][static_cast<std::size_t>(i)];
      mods.push_back({0, 0, b.kz, b.f, x0(i), b.sign});
    }

    for (int q : {+1, -1}) {
      const Vector4cd x = (q > 0 ? lup : lum).solve(-contrib(mods, q, 1));
      Matrix2cd& R1 = q > 0 ? out.R1_plus : out.R1_minus;
      R1(0, jp) = x(0);
      R1(1, jp) = x(1);
      for (int i = 0; i < 4; ++i) {
        const auto& b = basis[static_cast<std::size_t>(q + 1)][static_cast<std::size_t>(i)];
        mods.push_back({1, q, b.kz, b.f, x(i), b.sign});
      }
    }

    if (with_second_order) {
      const Vector4cd x2 = lu0.solve(-contrib(mods, 0, 2));
      out.R2(0, jp) = x2(0);
      out.R2(1, jp) = x2(1);
    }
  }
  return out;
}

}  // namespace casimir
