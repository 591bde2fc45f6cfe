// Low-level dense kernels (dot product, axpy) in two implementations: a
// scalar reference and an AVX2/NEON variant selected at runtime. The wide
// variants are compiled in separate translation units with the extended ISA
// enabled; this header only exposes the dispatching entry points.
//
// Environment: set SOFTRANK_FORCE_SCALAR=1 to pin the scalar path (used by
// the equivalence tests and available as an escape hatch).
#pragma once

#include <cstddef>
#include <string>

namespace softrank::kernels {

struct CpuCapabilities {
  bool avx2_fma = false;
  bool neon = false;
  bool force_scalar = false;  // SOFTRANK_FORCE_SCALAR=1 at first use
  static const CpuCapabilities& get();
};

// Name of the implementation currently answering dot()/axpy():
// "scalar", "avx2", or "neon".
std::string active_kernel_name();

// Reference implementations; always available, used as the comparison oracle.
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);

// Dispatching entry points.
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);

#if defined(SOFTRANK_HAVE_AVX2_TU)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
#endif
#if defined(SOFTRANK_HAVE_NEON_TU)
double dot_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
#endif

}  // namespace softrank::kernels
