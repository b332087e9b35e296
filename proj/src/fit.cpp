#include "casimir/fit.hpp"

#include <cmath>

#include "casimir/errors.hpp"

namespace casimir {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw fit_error("fit_line: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300 * n * sxx) throw fit_error("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw fit_error("fit_quadratic: need >= 3 points");
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd J(n, 3);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    J(i, 0) = x[i] * x[i];
    J(i, 1) = x[i];
    J(i, 2) = 1.0;
    b(i) = y[i];
  }
  const Eigen::Matrix3d N = J.transpose() * J;
  Eigen::FullPivLU<Eigen::Matrix3d> lu(N);
  if (!lu.isInvertible()) throw fit_error("fit_quadratic: degenerate abscissae");
  const Eigen::Vector3d p = lu.solve(J.transpose() * b);
  QuadraticFit f;
  f.a = p(0);
  f.b = p(1);
  f.c = p(2);
  f.chi2 = (J * p - b).squaredNorm();
  f.dof = n - 3;
  const double scale = f.dof > 0 ? f.chi2 / f.dof : 1.0;
  f.covariance = lu.inverse() * scale;
  return f;
}

LMResult fit_levenberg_marquardt(const FitModel& model, const std::vector<double>& x,
                                 const std::vector<double>& y,
                                 const std::vector<double>& sigma,
                                 const Eigen::VectorXd& initial, const LMOptions& opts) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(initial.size());
  if (y.size() != x.size() || sigma.size() != x.size())
    throw fit_error("fit_levenberg_marquardt: size mismatch");
  if (n <= m) throw fit_error("fit_levenberg_marquardt: underdetermined");
  for (double s : sigma)
    if (!(s > 0.0)) throw fit_error("fit_levenberg_marquardt: nonpositive sigma");

  auto chi2_of = [&](const Eigen::VectorXd& p) {
    double c = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = (y[i] - model(p, x[i])) / sigma[i];
      c += r * r;
    }
    return c;
  };

  // weighted Jacobian by forward differences
  auto jacobian = [&](const Eigen::VectorXd& pp) {
    Eigen::MatrixXd J(n, m);
    for (int j = 0; j < m; ++j) {
      const double h = std::max(std::abs(pp(j)), 1e-30) * 1e-7;
      Eigen::VectorXd ph = pp;
      ph(j) += h;
      for (int i = 0; i < n; ++i)
        J(i, j) = (model(ph, x[i]) - model(pp, x[i])) / (sigma[i] * h);
    }
    return J;
  };

  Eigen::VectorXd p = initial;
  double chi2 = chi2_of(p);
  double lambda = opts.lambda0;
  int iter = 0;
  bool converged = false;
  for (; iter < opts.max_iterations; ++iter) {
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) r(i) = (y[i] - model(p, x[i])) / sigma[i];
    const Eigen::MatrixXd J = jacobian(p);
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd Jtr = J.transpose() * r;

    bool stepped = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      Eigen::MatrixXd A = JtJ;
      for (int j = 0; j < m; ++j) A(j, j) *= 1.0 + lambda;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
      if (ldlt.info() != Eigen::Success) {
        lambda *= 10.0;
        continue;
      }
      const Eigen::VectorXd dp = ldlt.solve(Jtr);
      const Eigen::VectorXd pt = p + dp;
      const double ct = chi2_of(pt);
      if (std::isfinite(ct) && ct <= chi2) {
        const double gain = (chi2 - ct) / std::max(chi2, 1e-300);
        p = pt;
        chi2 = ct;
        lambda = std::max(lambda * 0.3, 1e-12);
        stepped = true;
        if (gain < opts.tolerance) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (converged) break;
    if (!stepped) {
      // no downhill step found at any damping: treat as converged if the
      // gradient is negligible, else fail
      if (Jtr.norm() < 1e-8 * std::sqrt(chi2 + 1.0)) {
        converged = true;
        break;
      }
      throw fit_error("fit_levenberg_marquardt: stalled without convergence");
    }
  }
  if (!converged) throw fit_error("fit_levenberg_marquardt: iteration limit reached");

  LMResult out;
  out.params = p;
  const Eigen::MatrixXd Jf = jacobian(p);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Jf.transpose() * Jf);
  if (!lu.isInvertible())
    throw fit_error("fit_levenberg_marquardt: singular covariance at optimum");
  out.covariance = lu.inverse();
  out.chi2 = chi2;
  out.dof = n - m;
  out.iterations = iter + 1;
  out.converged = true;
  return out;
}

}  // namespace casimir
