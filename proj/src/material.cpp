#include "casimir/material.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "casimir/constants.hpp"

namespace casimir {

double epsilon_iw(const MaterialModel& model, double zeta) {
  if (zeta < 0.0) throw std::domain_error("epsilon_iw: zeta must be >= 0");
  if (model.ideal_metal) throw std::logic_error("epsilon_iw: ideal metal bypasses epsilon");
  if (zeta == 0.0) return epsilon_divergent;
  double eps = 1.0;
  if (model.plasma_frequency > 0.0) {
    eps += model.plasma_frequency * model.plasma_frequency /
           (zeta * (zeta + model.relaxation_frequency));
  }
  for (const Oscillator& o : model.oscillators) {
    eps += o.strength / (o.resonance * o.resonance + zeta * zeta + zeta * o.damping);
  }
  return eps;
}

double epsilon_static(const MaterialModel& model) {
  if (model.ideal_metal || model.plasma_frequency > 0.0) return epsilon_divergent;
  double eps = 1.0;
  for (const Oscillator& o : model.oscillators) {
    if (o.resonance <= 0.0) return epsilon_divergent;
    eps += o.strength / (o.resonance * o.resonance);
  }
  return eps;
}

MatsubaraGrid matsubara_grid(double T, double target_rel_tol, double z_min) {
  if (T <= 0.0) throw std::domain_error("matsubara_grid: T must be > 0 (use the T=0 integral path)");
  if (z_min <= 0.0) throw std::domain_error("matsubara_grid: z_min must be > 0");
  if (target_rel_tol <= 0.0 || target_rel_tol >= 1.0)
    throw std::domain_error("matsubara_grid: tolerance must be in (0,1)");
  const double zeta1 = 2.0 * M_PI * constants::k_B * T / constants::hbar;
  // Tail bound: terms decay at least as exp(-2 z_min zeta_n / c).
  const double n_real = std::log(1.0 / target_rel_tol) * constants::c / (2.0 * z_min * zeta1);
  const std::size_t n_max = static_cast<std::size_t>(std::ceil(n_real)) + 2;
  MatsubaraGrid grid;
  grid.temperature = T;
  grid.zeta.resize(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) grid.zeta[n] = zeta1 * static_cast<double>(n);
  return grid;
}

MaterialModel MaterialModel::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("material file not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("material file parse error in " + path + ": " + e.what());
  }
  MaterialModel m;
  m.ideal_metal = j.value("ideal_metal", false);
  if (m.ideal_metal) return m;
  if (!j.contains("plasma_frequency_eV"))
    throw std::runtime_error("material file missing plasma_frequency_eV: " + path);
  m.plasma_frequency = j["plasma_frequency_eV"].get<double>() * constants::eV_over_hbar;
  m.relaxation_frequency = j.value("relaxation_frequency_eV", 0.0) * constants::eV_over_hbar;
  if (m.plasma_frequency < 0.0 || m.relaxation_frequency < 0.0)
    throw std::runtime_error("material file: negative Drude parameter in " + path);
  for (const auto& jo : j.value("oscillators", nlohmann::json::array())) {
    Oscillator o;
    o.strength = jo.at("f_eV2").get<double>() * constants::eV_over_hbar * constants::eV_over_hbar;
    o.resonance = jo.at("omega_eV").get<double>() * constants::eV_over_hbar;
    o.damping = jo.at("g_eV").get<double>() * constants::eV_over_hbar;
    if (o.strength < 0.0 || o.damping < 0.0)
      throw std::runtime_error("material file: negative oscillator parameter in " + path);
    m.oscillators.push_back(o);
  }
  return m;
}

}  // namespace casimir
