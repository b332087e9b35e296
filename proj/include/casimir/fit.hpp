#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace casimir {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Unweighted least-squares line through (x, y).
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// y = a x^2 + b x + c with parameter covariance scaled by the residual
// variance (chi^2 / dof). For dof = 0 the covariance is left unscaled.
struct QuadraticFit {
  double a = 0.0, b = 0.0, c = 0.0;
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double chi2 = 0.0;
  int dof = 0;
};

QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y);

// Weighted nonlinear least squares by Levenberg-Marquardt with a forward
// difference Jacobian. The model maps (params, x) -> prediction.
using FitModel = std::function<double(const Eigen::VectorXd&, double)>;

struct LMOptions {
  int max_iterations = 200;
  double tolerance = 1e-12;  // relative chi^2 improvement to declare done
  double lambda0 = 1e-3;
};

struct LMResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // (J^T W J)^-1 at the optimum
  double chi2 = 0.0;
  int dof = 0;
  int iterations = 0;
  bool converged = false;
};

// sigma: per-point standard deviations (weights 1/sigma^2); must be positive.
// Throws fit_error on non-convergence or singular normal equations.
LMResult fit_levenberg_marquardt(const FitModel& model, const std::vector<double>& x,
                                 const std::vector<double>& y,
                                 const std::vector<double>& sigma,
                                 const Eigen::VectorXd& initial, const LMOptions& opts = {});

}  // namespace casimir
