#pragma once

#include <string>
#include <vector>

#include "casimir/calibration.hpp"
#include "casimir/corrugation.hpp"
#include "casimir/electrostatics.hpp"
#include "casimir/material.hpp"

namespace casimir {

// Run configuration. Files use experiment-friendly units (nm, um, mV, deg);
// everything here is already converted to SI at parse time.
struct RunConfig {
  CorrugationGeometry geometry;
  MaterialModel material;
  double temperature = 300.0;           // K
  std::vector<double> thetas;           // rad
  std::vector<ForceMethod> methods;
  double z_min = 127e-9, z_max = 230e-9, z_step = 1e-9;  // m
  PlateTableOptions table;              // grid overrides
  CellQuadrature cell;
  LaplaceGrid laplace;
  double electro_tolerance = 1e-2;      // accepted |E_pert/E_laplace - 1|
  SynthParams synth;
  std::string dataset;                  // manifest path for `calibrate`
};

// Parses the JSON run configuration; referenced geometry/material files are
// resolved relative to the current directory. Throws data_error with the
// offending field name on validation failures.
RunConfig load_run_config(const std::string& path);

// All CSV output uses '%.*g' formatting through one code path, so a fixed
// config yields byte-identical files across runs.
void write_force_csv(const std::string& path, const ForceCurve& curve);
void write_validation_csv(const std::string& path, const PerturbativeValidationReport& report);
void write_extracted_force_csv(const std::string& path, const ExtractedForce& force);
void write_error_budget_csv(const std::string& path, const ErrorBudget& budget);
void write_vertex_voltage_csv(const std::string& path, const CalibrationResult& cal);
void write_endpoint_scan_csvs(const std::string& dir, const EndpointScan& scan);

// Calibration summary with uncertainties, JSON.
void write_calibration_report(const std::string& path, const CalibrationResult& cal);

// Deflection dataset on disk: one CSV per curve with header
// "z_piezo_nm, S_def_signal" plus manifest.json listing the applied voltages,
// the deflection-to-distance factor m, and the per-curve (file, V,
// repetition) records. read_dataset throws data_error naming the file and
// line on malformed rows.
void write_dataset(const std::string& dir, const DeflectionDataset& data);
DeflectionDataset read_dataset(const std::string& manifest_path);

}  // namespace casimir
