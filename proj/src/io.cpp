#include "casimir/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "casimir/errors.hpp"

namespace casimir {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline games
  if (!out) throw data_error("cannot open output file: " + path);
  return out;
}

ForceMethod method_from_string(const std::string& s) {
  if (s == "DER") return ForceMethod::DER;
  if (s == "PFA") return ForceMethod::PFA;
  if (s == "DER_T0") return ForceMethod::DER_T0;
  if (s == "DER_IDEAL") return ForceMethod::DER_IDEAL;
  throw data_error("config field 'methods': unknown method '" + s + "'");
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("config file not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw data_error("config parse error in " + path + ": " + e.what());
  }

  RunConfig c;
  try {
    if (j.contains("geometry")) c.geometry = CorrugationGeometry::from_json_file(j["geometry"]);
    if (j.contains("material")) c.material = MaterialModel::from_json_file(j["material"]);
    c.temperature = j.value("temperature_K", 300.0);

    for (double deg : j.value("theta_deg", std::vector<double>{0.0}))
      c.thetas.push_back(deg * M_PI / 180.0);
    for (const auto& m : j.value("methods", std::vector<std::string>{"DER"}))
      c.methods.push_back(method_from_string(m));

    c.z_min = j.value("z_min_nm", 127.0) * 1e-9;
    c.z_max = j.value("z_max_nm", 230.0) * 1e-9;
    c.z_step = j.value("z_step_nm", 1.0) * 1e-9;

    c.table.nodes = j.value("table_nodes", c.table.nodes);
    c.table.alpha_nodes = j.value("alpha_nodes", c.table.alpha_nodes);
    if (j.value("alpha_convention", std::string("paper")) == "physical")
      c.table.alpha_convention = AlphaConvention::physical;
    c.cell.x_nodes = j.value("cell_x_nodes", c.cell.x_nodes);
    c.cell.y_nodes = j.value("cell_y_nodes", c.cell.y_nodes);
    c.laplace.x_nodes = j.value("laplace_x_nodes", c.laplace.x_nodes);
    c.laplace.eta_nodes = j.value("laplace_eta_nodes", c.laplace.eta_nodes);
    c.electro_tolerance = j.value("electro_tolerance", 1e-2);

    c.synth.V0 = j.value("synth_V0_mV", c.synth.V0 * 1e3) * 1e-3;
    c.synth.z0 = j.value("synth_z0_nm", c.synth.z0 * 1e9) * 1e-9;
    c.synth.sigma_prime = j.value("synth_sigma_prime_pN_per_mV", c.synth.sigma_prime * 1e9) * 1e-9;
    c.synth.noise = j.value("synth_noise_V", c.synth.noise);
    c.synth.drift = j.value("synth_drift_V_per_m", c.synth.drift);
    c.synth.repetitions = j.value("synth_repetitions", c.synth.repetitions);
    c.synth.z_piezo_max = j.value("synth_z_piezo_max_um", c.synth.z_piezo_max * 1e6) * 1e-6;
    c.dataset = j.value("dataset", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw data_error("config field error in " + path + ": " + e.what());
  }

  if (c.thetas.empty()) throw data_error("config field 'theta_deg': list is empty");
  for (double t : c.thetas)
    if (t < 0.0 || t > 3.0 * M_PI / 180.0)
      throw data_error("config field 'theta_deg': angle outside [0, 3] degrees");
  if (c.methods.empty()) throw data_error("config field 'methods': list is empty");
  if (!(c.z_step > 0.0) || !(c.z_max > c.z_min))
    throw data_error("config fields 'z_*_nm': need z_max > z_min and z_step > 0");
  if (!(c.electro_tolerance > 0.0))
    throw data_error("config field 'electro_tolerance': must be positive");
  return c;
}

void write_force_csv(const std::string& path, const ForceCurve& curve) {
  auto out = open_out(path);
  out << "z_nm, F_pN, method, theta_deg\n";
  for (const ForcePoint& p : curve.points)
    out << fmt(p.z * 1e9) << ", " << fmt(p.F * 1e12) << ", " << to_string(p.method) << ", "
        << fmt(p.theta * 180.0 / M_PI) << "\n";
}

void write_validation_csv(const std::string& path, const PerturbativeValidationReport& report) {
  auto out = open_out(path);
  out << "z_nm, E_perturbative, E_laplace, rel_dev\n";
  for (const auto& r : report.rows)
    out << fmt(r.z * 1e9) << ", " << fmt(r.e_perturbative) << ", " << fmt(r.e_laplace) << ", "
        << fmt(r.rel_dev) << "\n";
}

void write_extracted_force_csv(const std::string& path, const ExtractedForce& force) {
  auto out = open_out(path);
  out << "z_nm, F_pN, sem_pN\n";
  for (std::size_t i = 0; i < force.z.size(); ++i)
    out << fmt(force.z[i] * 1e9) << ", " << fmt(force.F[i] * 1e12) << ", "
        << fmt(force.sem[i] * 1e12) << "\n";
}

void write_error_budget_csv(const std::string& path, const ErrorBudget& budget) {
  auto out = open_out(path);
  out << "z_nm, random_pN, systematic_pN, total_pN\n";
  for (const auto& r : budget.rows)
    out << fmt(r.z * 1e9) << ", " << fmt(r.random_err * 1e12) << ", "
        << fmt(r.systematic_err * 1e12) << ", " << fmt(r.total * 1e12) << "\n";
}

void write_vertex_voltage_csv(const std::string& path, const CalibrationResult& cal) {
  auto out = open_out(path);
  out << "z_nm, V0_mV\n";
  for (std::size_t i = 0; i < cal.v0_series.size(); ++i)
    out << fmt(cal.v0_series_z[i] * 1e9) << ", " << fmt(cal.v0_series[i] * 1e3) << "\n";
}

void write_endpoint_scan_csvs(const std::string& dir, const EndpointScan& scan) {
  {
    auto out = open_out(dir + "/endpoint_sigma_prime.csv");
    out << "z_end_nm, sigma_prime_pN_per_mV, sigma_prime_err_pN_per_mV, ok\n";
    for (const auto& r : scan.rows)
      out << fmt(r.z_end * 1e9) << ", " << fmt(r.fit.sigma_prime * 1e9) << ", "
          << fmt(r.fit.sigma_prime_err * 1e9) << ", " << (r.ok ? 1 : 0) << "\n";
  }
  {
    auto out = open_out(dir + "/endpoint_z0.csv");
    out << "z_end_nm, z0_nm, z0_err_nm, ok\n";
    for (const auto& r : scan.rows)
      out << fmt(r.z_end * 1e9) << ", " << fmt(r.fit.z0 * 1e9) << ", " << fmt(r.fit.z0_err * 1e9)
          << ", " << (r.ok ? 1 : 0) << "\n";
  }
}

void write_calibration_report(const std::string& path, const CalibrationResult& cal) {
  nlohmann::json j;
  j["V0_mV"] = cal.V0 * 1e3;
  j["V0_err_mV"] = cal.V0_err * 1e3;
  j["z0_nm"] = cal.z0 * 1e9;
  j["z0_err_nm"] = cal.z0_err * 1e9;
  j["sigma_prime_pN_per_mV"] = cal.sigma_prime * 1e9;
  j["sigma_prime_err_pN_per_mV"] = cal.sigma_prime_err * 1e9;
  j["m_nm_per_V"] = cal.m * 1e9;
  j["m_sigma_nm_per_V"] = cal.m_sigma * 1e9;
  j["drift_V_per_m"] = cal.drift;
  j["endpoint_scan_flagged"] = cal.scan.flagged;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_dataset(const std::string& dir, const DeflectionDataset& data) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["m_nm_per_V"] = data.m * 1e9;
  manifest["m_sigma_nm_per_V"] = data.m_sigma * 1e9;
  for (double v : data.voltages) manifest["voltages_mV"].push_back(v * 1e3);
  for (std::size_t i = 0; i < data.curves.size(); ++i) {
    const DeflectionCurve& c = data.curves[i];
    char name[32];
    std::snprintf(name, sizeof(name), "curve_%03zu.csv", i);
    auto out = open_out(dir + "/" + name);
    out << "z_piezo_nm, S_def_signal\n";
    for (std::size_t k = 0; k < c.z_piezo.size(); ++k)
      out << fmt(c.z_piezo[k] * 1e9) << ", " << fmt(c.s_def[k]) << "\n";
    nlohmann::json rec;
    rec["file"] = name;
    rec["V_mV"] = c.V * 1e3;
    rec["repetition"] = c.repetition;
    manifest["curves"].push_back(rec);
  }
  auto out = open_out(dir + "/manifest.json");
  out << manifest.dump(2) << "\n";
}

DeflectionDataset read_dataset(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw data_error("dataset manifest not found: " + manifest_path);
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const std::exception& e) {
    throw data_error("dataset manifest parse error in " + manifest_path + ": " + e.what());
  }

  const std::string dir = std::filesystem::path(manifest_path).parent_path().string();
  DeflectionDataset data;
  try {
    data.m = manifest.at("m_nm_per_V").get<double>() * 1e-9;
    data.m_sigma = manifest.value("m_sigma_nm_per_V", 0.5) * 1e-9;
    for (double v : manifest.at("voltages_mV")) data.voltages.push_back(v * 1e-3);

    for (const auto& rec : manifest.at("curves")) {
      DeflectionCurve c;
      c.V = rec.at("V_mV").get<double>() * 1e-3;
      c.repetition = rec.value("repetition", 0);
      const std::string file = rec.at("file");
      const std::string path = dir.empty() ? file : dir + "/" + file;
      std::ifstream cf(path);
      if (!cf) throw data_error("dataset curve file not found: " + path);
      std::string line;
      int lineno = 0;
      while (std::getline(cf, line)) {
        ++lineno;
        if (lineno == 1) {
          if (line.rfind("z_piezo_nm", 0) != 0)
            throw data_error(path + ": line 1: missing 'z_piezo_nm, S_def_signal' header");
          continue;
        }
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double z = 0.0, s = 0.0;
        std::string extra;
        if (!(row >> z >> s) || (row >> extra))
          throw data_error(path + ": line " + std::to_string(lineno) +
                           ": expected two numeric fields");
        c.z_piezo.push_back(z * 1e-9);
        c.s_def.push_back(s);
      }
      data.curves.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw data_error("dataset manifest field error in " + manifest_path + ": " + e.what());
  }
  return data;
}

}  // namespace casimir
