#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "casimir/calibration.hpp"
#include "casimir/corrugation.hpp"
#include "casimir/electrostatics.hpp"
#include "casimir/errors.hpp"
#include "casimir/io.hpp"

using namespace casimir;

namespace {

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return dir + "/" + name;
}

std::string curve_name(double theta, ForceMethod method) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "force_theta%.1f_%s.csv", theta * 180.0 / M_PI,
                to_string(method).c_str());
  return buf;
}

// Builds the plate table matching the method variant over the z-range plus
// the corrugation envelope.
PlateFunctionTable build_table(const RunConfig& c, ForceMethod method) {
  MaterialModel model = c.material;
  double T = c.temperature;
  if (method == ForceMethod::DER_T0) T = -1.0;
  if (method == ForceMethod::DER_IDEAL) {
    model = MaterialModel();
    model.ideal_metal = true;
    T = -1.0;
  }
  const double env = c.geometry.A1 + c.geometry.A2 + 2e-9;
  return PlateFunctionTable::build(model, T, c.z_min - env, c.z_max + env, c.table);
}

int cmd_force(const RunConfig& c, const std::string& out_dir) {
  std::vector<double> z_grid;
  for (double z = c.z_min; z <= c.z_max + 0.5 * c.z_step; z += c.z_step) z_grid.push_back(z);

  nlohmann::json summary;
  for (ForceMethod method : c.methods) {
    const PlateFunctionTable table = build_table(c, method);
    for (double theta : c.thetas) {
      const ForceCurve curve = force_curve(c.geometry, table, z_grid, theta, method, c.cell);
      write_force_csv(out_path(out_dir, curve_name(theta, method)), curve);
      char key[64];
      std::snprintf(key, sizeof(key), "theta%.1f_%s", theta * 180.0 / M_PI,
                    to_string(method).c_str());
      summary["F_pN_at_z_min"][key] = curve.points.front().F * 1e12;
      summary["F_pN_at_z_max"][key] = curve.points.back().F * 1e12;
    }
  }

  // PFA deviation report when both methods were requested
  const bool has_der =
      std::find(c.methods.begin(), c.methods.end(), ForceMethod::DER) != c.methods.end();
  const bool has_pfa =
      std::find(c.methods.begin(), c.methods.end(), ForceMethod::PFA) != c.methods.end();
  if (has_der && has_pfa) {
    const PlateFunctionTable table = build_table(c, ForceMethod::DER);
    for (double theta : c.thetas) {
      const ForceCurve der = force_curve(c.geometry, table, z_grid, theta, ForceMethod::DER, c.cell);
      const ForceCurve pfa = force_curve(c.geometry, table, z_grid, theta, ForceMethod::PFA, c.cell);
      const auto rows = comparison_report(der, pfa);
      double max_dev = 0.0;
      for (const auto& r : rows) max_dev = std::max(max_dev, std::abs(r.ratio - 1.0));
      char key[32];
      std::snprintf(key, sizeof(key), "theta%.1f", theta * 180.0 / M_PI);
      summary["max_pfa_deviation"][key] = max_dev;
    }
  }

  std::ofstream rep(out_path(out_dir, "summary.json"), std::ios::binary);
  rep << summary.dump(2) << "\n";
  return 0;
}

int cmd_validate(const RunConfig& c, const std::string& out_dir) {
  std::vector<double> z_grid;
  for (double z = c.z_min; z <= c.z_max + 0.5 * c.z_step; z += c.z_step) z_grid.push_back(z);
  const auto report = validate_perturbative(c.geometry, z_grid, c.laplace);
  write_validation_csv(out_path(out_dir, "electrostatics_validation.csv"), report);
  if (report.max_rel_dev > c.electro_tolerance)
    throw accuracy_error("perturbative/Laplace deviation " + std::to_string(report.max_rel_dev) +
                         " exceeds tolerance " + std::to_string(c.electro_tolerance));
  return 0;
}

int cmd_synth(const RunConfig& c, const std::string& out_dir, std::uint64_t seed) {
  // force model for the synthetic curves: corrugated DER would be accurate
  // but slow; the calibration never sees the model, only the curves, so a
  // smooth power law of the right magnitude serves
  auto force_model = [](double z) { return 85e-12 * std::pow(130e-9 / z, 3.0); };
  const DeflectionDataset data = synth_generate(force_model, c.geometry, c.thetas.front(),
                                                c.synth, seed);
  write_dataset(out_dir, data);
  return 0;
}

int cmd_calibrate(const RunConfig& c, const std::string& out_dir) {
  if (c.dataset.empty()) throw data_error("config field 'dataset': missing manifest path");
  const DeflectionDataset data = read_dataset(c.dataset);
  const double theta = c.thetas.front();
  const CalibrationResult cal = calibrate(data, c.geometry, theta);
  write_calibration_report(out_path(out_dir, "calibration_report.json"), cal);
  write_vertex_voltage_csv(out_path(out_dir, "vertex_voltage.csv"), cal);
  write_endpoint_scan_csvs(out_dir, cal.scan);
  const ExtractedForce force = extract_casimir(data, cal, c.geometry, theta);
  write_extracted_force_csv(out_path(out_dir, "force_extracted.csv"), force);
  write_error_budget_csv(out_path(out_dir, "error_budget.csv"), error_budget(force, cal, c.geometry, theta));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir force between crossed corrugated surfaces: theory curves, "
               "electrostatic calibration, and validation pipelines"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed for synthetic generation");
  app.add_option("--threads", threads, "worker threads (output is identical for any value)");

  auto* force = app.add_subcommand("force", "theory force curves per (theta, method)");
  auto* calib = app.add_subcommand("calibrate", "electrostatic calibration of a dataset");
  auto* valid = app.add_subcommand("validate-electrostatics",
                                   "perturbative energy against the Laplace solver");
  auto* synth = app.add_subcommand("synth", "generate a synthetic deflection dataset");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig config = load_run_config(config_path);
    if (force->parsed()) return cmd_force(config, out_dir);
    if (calib->parsed()) return cmd_calibrate(config, out_dir);
    if (valid->parsed()) return cmd_validate(config, out_dir);
    if (synth->parsed()) return cmd_synth(config, out_dir, seed);
  } catch (const data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const accuracy_error& e) {
    std::fprintf(stderr, "accuracy error: %s\n", e.what());
    return 2;
  } catch (const fit_error& e) {
    std::fprintf(stderr, "fit error: %s\n", e.what());
    return 2;
  }
  return 0;
}
