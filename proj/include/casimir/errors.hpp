#pragma once

#include <stdexcept>

namespace casimir {

// Quadrature / extrapolation did not reach its target (CLI exit code 2).
struct accuracy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Nonlinear or linear fit failed (CLI exit code 2).
struct fit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or insufficient input data (CLI exit code 3).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace casimir
