#include "casimir/plate_table.hpp"

#include <cmath>
#include <stdexcept>

namespace casimir {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 3 || y_.size() != n) throw std::invalid_argument("CubicSpline: need >= 3 nodes");
  for (std::size_t i = 1; i < n; ++i)
    if (x_[i] <= x_[i - 1]) throw std::invalid_argument("CubicSpline: grid not increasing");
  // natural boundary conditions; Thomas algorithm on the tridiagonal system
  m_.assign(n, 0.0);
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  diag[0] = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    diag[i] = 2.0 * (h0 + h1);
    upper[i] = h1;
    rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
  }
  diag[n - 1] = 1.0;
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double w = (x_[i] - x_[i - 1]) / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
    if (i == 1) break;
  }
}

double CubicSpline::operator()(double xq) const {
  if (xq < x_.front() || xq > x_.back())
    throw std::domain_error("CubicSpline: query outside table range");
  std::size_t lo = 0, hi = x_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    (x_[mid] <= xq ? lo : hi) = mid;
  }
  const double h = x_[hi] - x_[lo];
  const double a = (x_[hi] - xq) / h, b = (xq - x_[lo]) / h;
  return a * y_[lo] + b * y_[hi] +
         ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * h * h / 6.0;
}

PlateFunctionTable PlateFunctionTable::build(const MaterialModel& model, double T, double h_min,
                                             double h_max, const PlateTableOptions& opts) {
  if (h_min <= 0.0 || h_max <= h_min)
    throw std::domain_error("PlateFunctionTable: invalid range");
  PlateFunctionTable t;
  t.h_min_ = h_min - opts.pad;
  t.h_max_ = h_max + opts.pad;
  t.T_ = T;
  if (t.h_min_ <= 0.0) throw std::domain_error("PlateFunctionTable: range reaches contact");

  std::vector<double> hg(static_cast<std::size_t>(opts.nodes));
  std::vector<double> u(hg.size()), up(hg.size());
  for (std::size_t i = 0; i < hg.size(); ++i) {
    const double H =
        t.h_min_ + (t.h_max_ - t.h_min_) * static_cast<double>(i) / (hg.size() - 1.0);
    hg[i] = H;
    if (T > 0.0) {
      u[i] = plate_energy(model, T, H, opts.lifshitz);
      up[i] = plate_energy_derivative(model, T, H, opts.lifshitz);
    } else {
      u[i] = plate_energy_T0(model, H, opts.lifshitz);
      up[i] = plate_energy_T0_derivative(model, H, opts.lifshitz);
    }
  }
  t.u_ = CubicSpline(hg, u);
  t.uprime_ = CubicSpline(hg, up);

  std::vector<double> ha(static_cast<std::size_t>(opts.alpha_nodes));
  std::vector<double> a3(ha.size());
  for (std::size_t i = 0; i < ha.size(); ++i) {
    const double H =
        t.h_min_ + (t.h_max_ - t.h_min_) * static_cast<double>(i) / (ha.size() - 1.0);
    ha[i] = H;
    const AlphaPoint ap = T > 0.0 ? casimir::alpha(model, T, H, opts.kernel)
                                  : casimir::alpha_T0(model, H, opts.kernel);
    const double sign = opts.alpha_convention == AlphaConvention::paper ? -1.0 : 1.0;
    a3[i] = sign * ap.alpha * H * H * H;
  }
  t.alpha_h3_ = CubicSpline(ha, a3);
  return t;
}

void PlateFunctionTable::check_range(double H) const {
  if (H < h_min_ || H > h_max_)
    throw std::domain_error("PlateFunctionTable: separation outside tabulated range");
}

double PlateFunctionTable::U(double H) const {
  check_range(H);
  return u_(H);
}

double PlateFunctionTable::Uprime(double H) const {
  check_range(H);
  return uprime_(H);
}

double PlateFunctionTable::alpha(double H) const {
  check_range(H);
  return alpha_h3_(H) / (H * H * H);
}

}  // namespace casimir
