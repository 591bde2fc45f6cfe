#include "softrank/kernels.hpp"

#include <cstdlib>

namespace softrank::kernels {

const CpuCapabilities& CpuCapabilities::get() {
  static const CpuCapabilities caps = [] {
    CpuCapabilities c;
    const char* force = std::getenv("SOFTRANK_FORCE_SCALAR");
    c.force_scalar = force != nullptr && force[0] == '1';
#if defined(SOFTRANK_HAVE_AVX2_TU) && defined(__x86_64__)
    c.avx2_fma = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#endif
#if defined(SOFTRANK_HAVE_NEON_TU)
    c.neon = true;  // NEON is mandatory on aarch64
#endif
    return c;
  }();
  return caps;
}

std::string active_kernel_name() {
  const auto& c = CpuCapabilities::get();
  if (c.force_scalar) return "scalar";
  if (c.avx2_fma) return "avx2";
  if (c.neon) return "neon";
  return "scalar";
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot(const double* a, const double* b, std::size_t n) {
  const auto& c = CpuCapabilities::get();
  if (!c.force_scalar) {
#if defined(SOFTRANK_HAVE_AVX2_TU)
    if (c.avx2_fma) return dot_avx2(a, b, n);
#endif
#if defined(SOFTRANK_HAVE_NEON_TU)
    if (c.neon) return dot_neon(a, b, n);
#endif
  }
  return dot_scalar(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const auto& c = CpuCapabilities::get();
  if (!c.force_scalar) {
#if defined(SOFTRANK_HAVE_AVX2_TU)
    if (c.avx2_fma) {
      axpy_avx2(alpha, x, y, n);
      return;
    }
#endif
#if defined(SOFTRANK_HAVE_NEON_TU)
    if (c.neon) {
      axpy_neon(alpha, x, y, n);
      return;
    }
#endif
  }
  axpy_scalar(alpha, x, y, n);
}

}  // namespace softrank::kernels
