#pragma once

#include <limits>
#include <string>
#include <vector>

namespace casimir {

struct Oscillator {
  double strength = 0.0;   // f_i, rad^2/s^2
  double resonance = 0.0;  // omega_i, rad/s
  double damping = 0.0;    // g_i, rad/s
};

struct MaterialModel {
  double plasma_frequency = 0.0;      // omega_p, rad/s
  double relaxation_frequency = 0.0;  // gamma, rad/s
  std::vector<Oscillator> oscillators;
  bool ideal_metal = false;

  // True when the model has no response at all (epsilon == 1 everywhere).
  bool is_vacuum() const {
    return !ideal_metal && plasma_frequency == 0.0 && oscillators.empty();
  }

  static MaterialModel from_json_file(const std::string& path);
};

// Dielectric permittivity on the imaginary frequency axis,
// eps(i zeta) = 1 + wp^2/(zeta(zeta+gamma)) + sum_i f_i/(w_i^2 + zeta^2 + zeta g_i).
// zeta == 0 returns the divergent marker (infinity) consumed only by the
// zero-frequency reflection limit; zeta < 0 is a domain error.
double epsilon_iw(const MaterialModel& model, double zeta);

inline constexpr double epsilon_divergent = std::numeric_limits<double>::infinity();

// Static permittivity limit: infinity for any free-electron model,
// 1 + sum f_i/w_i^2 for a pure oscillator model, 1 for vacuum.
double epsilon_static(const MaterialModel& model);

struct MatsubaraGrid {
  double temperature = 0.0;         // K
  std::vector<double> zeta;         // rad/s, zeta[n] = 2 pi k_B T n / hbar
  static constexpr double weight0 = 0.5;
  double weight(std::size_t n) const { return n == 0 ? weight0 : 1.0; }
};

// n_max chosen so the neglected tail of the Lifshitz sum at separation z_min
// is below target_rel_tol (bounded through the exp(-2 H zeta_n / c) factor).
MatsubaraGrid matsubara_grid(double T, double target_rel_tol, double z_min);

}  // namespace casimir
