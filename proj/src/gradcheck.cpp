#include "softrank/gradcheck.hpp"

#include <cmath>

#include "softrank/errors.hpp"

namespace softrank {

GradCheckReport finite_diff_check(const std::function<double(const Vec64&)>& f,
                                  const std::function<Vec64(const Vec64&)>& analytic_grad,
                                  const Vec64& point, double h, double tol) {
  if (h <= 0.0) throw ParameterError("finite_diff_check: h must be > 0");
  const Vec64 grad = analytic_grad(point);
  if (grad.len() != point.len()) {
    throw ShapeError(detail::msg("finite_diff_check: gradient length ", grad.len(),
                                 " != point length ", point.len()));
  }
  GradCheckReport report;
  report.per_param_errors.reserve(point.len());
  Vec64 probe = point;
  for (std::size_t i = 0; i < point.len(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double fp = f(probe);
    probe[i] = saved - h;
    const double fm = f(probe);
    probe[i] = saved;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw EvalError(detail::msg("finite_diff_check: non-finite function value near coordinate ", i));
    }
    const double numeric = (fp - fm) / (2.0 * h);
    const double analytic = grad[i];
    const double rel =
        std::fabs(analytic - numeric) / std::max(1e-8, std::fabs(analytic) + std::fabs(numeric));
    report.per_param_errors.emplace_back(detail::msg("x[", i, "]"), rel);
    report.max_rel_error = std::max(report.max_rel_error, rel);
  }
  report.passed = report.max_rel_error < tol;
  return report;
}

}  // namespace softrank
