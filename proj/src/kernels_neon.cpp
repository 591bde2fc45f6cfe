// NEON kernel variants for aarch64 builds. Compiled only when the target
// architecture is ARM64 (NEON with float64x2 is baseline there).
#include <arm_neon.h>

#include "softrank/kernels.hpp"

namespace softrank::kernels {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  for (; i + 2 <= n; i += 2) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double total = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t vy = vld1q_f64(y + i);
    vy = vfmaq_f64(vy, va, vld1q_f64(x + i));
    vst1q_f64(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace softrank::kernels
