#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "casimir/corrugation.hpp"
#include "casimir/electrostatics.hpp"

namespace casimir {

// Sign convention in this module: attractive forces are positive, matching
// the force-extraction relation F_cas = sigma' S_def - X (V - V0)^2 with
// positive electrostatic term. Theory curves from force_sphere (negative
// attractive) must be negated at the boundary.

// One voltage sweep repetition: deflection signal (V) against piezo
// displacement (m) on a shared 1 nm grid.
struct DeflectionCurve {
  double V = 0.0;  // applied voltage
  int repetition = 0;
  std::vector<double> z_piezo;
  std::vector<double> s_def;
};

struct DeflectionDataset {
  std::vector<double> voltages;  // distinct applied voltages
  std::vector<DeflectionCurve> curves;
  double m = 102.1e-9;      // separation change per unit deflection signal, m/V
  double m_sigma = 0.5e-9;  // its uncertainty
};

// Fits a line to the signal where z_piezo > z_min (no surface forces there)
// and subtracts it from the whole curve. Throws data_error if fewer than 100
// samples lie beyond z_min.
DeflectionCurve drift_correct(const DeflectionCurve& curve, double z_min = 1.7e-6);

// z = z_piezo + m S_def + z0, elementwise.
std::vector<double> reconstruct_separation(const std::vector<double>& z_piezo,
                                           const std::vector<double>& s_def, double m,
                                           double z0);

// Least-squares parabola S = beta (V - V0)^2 + vertex over the voltage list.
struct ParabolaFit {
  double V0 = 0.0;
  double V0_err = 0.0;
  double beta = 0.0;      // curvature, 1/V
  double beta_err = 0.0;
  double vertex = 0.0;    // signal at V = V0 (the Casimir channel)
  bool degenerate = false;         // curvature indistinguishable from zero
  bool negative_curvature = false; // sign-convention diagnostic
};

ParabolaFit fit_parabola(const std::vector<double>& voltages,
                         const std::vector<double>& s_def);

// One curvature sample: z_rel is the separation up to the unknown offset z0
// (z_piezo plus the deflection correction at the parabola vertex).
struct BetaSample {
  double z_rel = 0.0;  // m
  double beta = 0.0;   // 1/V
  double sigma = 0.0;  // 1/V
};

struct BetaFit {
  double sigma_prime = 0.0;  // N/V
  double sigma_prime_err = 0.0;
  double z0 = 0.0;  // m
  double z0_err = 0.0;
  double chi2 = 0.0;
  int dof = 0;
};

// Weighted fit of beta(z_rel) = X(z_rel + z0) / sigma', with 1/sigma'
// profiled out analytically and z0 found by a bracketed scan. Assumes the
// samples come from curves whose electrostatic tail was preserved by the
// offset/drift referencing in calibrate(), so no nuisance terms are needed.
// The covariance carries a chi2/dof scale, a Newey-West correction for
// serial correlation, and a constant factor for noise sources coherent
// across every sample, calibrated on synthetic ensembles.
BetaFit fit_beta_curve(const std::vector<BetaSample>& samples,
                       const CorrugationGeometry& geom, double theta);

// Endpoints for the truncation-stability scan: 1000 nm down in 100 nm steps
// to 500 nm, then 50 nm steps down to 150 nm (13 values).
std::vector<double> endpoint_grid();

struct EndpointFit {
  double z_end = 0.0;
  BetaFit fit;
  bool ok = false;
};

struct EndpointScan {
  std::vector<EndpointFit> rows;
  bool flagged = false;  // some endpoint departs from the full fit beyond errors
};

// Refits beta(z) with the samples truncated at each endpoint and flags any
// endpoint whose (sigma', z0) departs from the full fit by more than 3 sigma.
EndpointScan endpoint_scan(const std::vector<BetaSample>& samples,
                           const CorrugationGeometry& geom, double theta,
                           const std::vector<double>& endpoints = endpoint_grid());

struct CalibrationResult {
  double V0 = 0.0, V0_err = 0.0;                    // V
  double z0 = 0.0, z0_err = 0.0;                    // m
  double sigma_prime = 0.0, sigma_prime_err = 0.0;  // N/V
  double m = 0.0, m_sigma = 0.0;                    // passed through from the dataset
  double drift = 0.0;               // common signal drift slope, per m of z_piezo
  double v_rms = 0.0;               // rms of (V_i - V0) over the applied voltages
  double window_lo = 0.0, window_hi = 0.0;  // drift window in z_piezo
  std::vector<double> v0_series_z;  // z_rel of each per-separation parabola
  std::vector<double> v0_series;    // its fitted V0
  EndpointScan scan;
};

// Full pipeline: drift correction, repetition averaging, per-separation
// parabolas, beta-curve fit, endpoint scan.
CalibrationResult calibrate(const DeflectionDataset& data, const CorrugationGeometry& geom,
                            double theta);

struct ExtractedForce {
  std::vector<double> z;    // m, 1 nm grid
  std::vector<double> F;    // N, mean over curves, attractive positive
  std::vector<double> sem;  // N, standard error of the mean
  int n_curves = 0;
};

// F_cas = sigma' S_def - X(z)(V - V0)^2 per curve, interpolated to a common
// 1 nm separation grid and averaged.
ExtractedForce extract_casimir(const DeflectionDataset& data, const CalibrationResult& cal,
                               const CorrugationGeometry& geom, double theta,
                               double z_max = 800e-9);

struct ErrorBudgetRow {
  double z = 0.0;
  double random_err = 0.0;
  double systematic_err = 0.0;
  double total = 0.0;
};

struct ErrorBudget {
  std::vector<ErrorBudgetRow> rows;
  double confidence = 0.67;
  int dof = 0;
  bool random_flat = true;  // false if the random component varies > 20% in z
};

// Random: standard error of the 110-curve mean (Student factor at 67% with
// large dof taken as 1). Systematic: first-order propagation of the fitted
// (sigma', z0, V0, m) uncertainties plus a constant instrument noise floor,
// added in quadrature.
ErrorBudget error_budget(const ExtractedForce& force, const CalibrationResult& cal,
                         const CorrugationGeometry& geom, double theta,
                         double noise_floor = 0.585e-12);

struct SynthParams {
  double V0 = -90.2e-3;        // V
  double z0 = 126.2e-9;        // m
  double sigma_prime = 1.35e-9;  // N/V
  double m = 102.1e-9;         // m/V
  double m_sigma = 0.5e-9;
  double noise = 4.3e-3;       // V rms per sample
  double drift = 0.0;          // V per m of z_piezo
  int repetitions = 10;
  std::vector<double> voltages;  // empty: 11 values spanning [-240, +60] mV
  double z_piezo_max = 5e-6;
  double z_piezo_step = 1e-9;
};

// Forward model: inverts the extraction and separation relations to produce
// deflection curves for a given attractive-positive Casimir force model,
// with additive Gaussian noise and linear drift. Deterministic in the seed.
DeflectionDataset synth_generate(const std::function<double(double)>& casimir_force,
                                 const CorrugationGeometry& geom, double theta,
                                 const SynthParams& params, std::uint64_t seed);

}  // namespace casimir
