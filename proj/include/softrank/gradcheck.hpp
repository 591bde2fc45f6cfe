// Finite-difference gradient checking. The oracle every exported backward
// pass is verified against: central differences with configurable step,
// symmetric relative error with an absolute floor.
#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "softrank/vec.hpp"

namespace softrank {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<std::pair<std::string, double>> per_param_errors;
  bool passed = false;
};

// Compares analytic_grad(point) against central differences of f at point.
// rel_error_i = |a_i - n_i| / max(1e-8, |a_i| + |n_i|); passed iff the max
// over coordinates is < tol. Throws EvalError (naming the coordinate) if f
// returns a non-finite value during probing.
GradCheckReport finite_diff_check(const std::function<double(const Vec64&)>& f,
                                  const std::function<Vec64(const Vec64&)>& analytic_grad,
                                  const Vec64& point, double h, double tol);

}  // namespace softrank
