#include <cmath>
#include <cstdlib>
#include <vector>

#include <doctest.h>

#include "softrank/kernels.hpp"
#include "softrank/rng.hpp"

using namespace softrank;

namespace {

std::vector<double> random_buf(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform_in(-2.0, 2.0);
  return v;
}

// a*x + y computed exactly like axpy_scalar, as an independent reference.
std::vector<double> axpy_ref(double alpha, const std::vector<double>& x,
                             std::vector<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
  return y;
}

}  // namespace

TEST_CASE("dot_scalar matches a hand-rolled accumulation") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{4.0, -5.0, 6.0};
  CHECK(kernels::dot_scalar(a.data(), b.data(), 3) == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(kernels::dot_scalar(a.data(), b.data(), 0) == 0.0);
}

TEST_CASE("dispatched dot agrees with the scalar reference") {
  Rng rng(317);
  // Lengths straddle the SIMD width boundaries (tail handling).
  for (std::size_t n : {1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 127, 1000}) {
    const auto a = random_buf(rng, n);
    const auto b = random_buf(rng, n);
    const double ref = kernels::dot_scalar(a.data(), b.data(), n);
    const double got = kernels::dot(a.data(), b.data(), n);
    // FMA reassociation changes rounding, not the value being computed.
    CHECK(std::fabs(got - ref) <=
          1e-12 * std::max(1.0, std::fabs(ref)));
  }
}

TEST_CASE("dispatched axpy agrees with the scalar reference") {
  Rng rng(4711);
  for (std::size_t n : {1, 3, 4, 7, 8, 13, 16, 21, 64, 129}) {
    const auto x = random_buf(rng, n);
    const auto y0 = random_buf(rng, n);
    const double alpha = rng.uniform_in(-3.0, 3.0);

    auto y_ref = y0;
    kernels::axpy_scalar(alpha, x.data(), y_ref.data(), n);
    auto y_got = y0;
    kernels::axpy(alpha, x.data(), y_got.data(), n);
    auto y_ind = axpy_ref(alpha, x, y0);

    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::fabs(y_got[i] - y_ref[i]) <= 1e-12 * std::max(1.0, std::fabs(y_ref[i])));
      CHECK(y_ref[i] == doctest::Approx(y_ind[i]).epsilon(1e-15));
    }
  }
}

#if defined(SOFTRANK_HAVE_AVX2_TU)
TEST_CASE("avx2 kernels match scalar on this machine when available") {
  if (!kernels::CpuCapabilities::get().avx2_fma) return;  // nothing to compare
  Rng rng(99);
  for (std::size_t n : {1, 5, 8, 9, 24, 100}) {
    const auto a = random_buf(rng, n);
    const auto b = random_buf(rng, n);
    const double ref = kernels::dot_scalar(a.data(), b.data(), n);
    const double got = kernels::dot_avx2(a.data(), b.data(), n);
    CHECK(std::fabs(got - ref) <= 1e-12 * std::max(1.0, std::fabs(ref)));

    auto y_ref = b;
    auto y_got = b;
    kernels::axpy_scalar(1.75, a.data(), y_ref.data(), n);
    kernels::axpy_avx2(1.75, a.data(), y_got.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::fabs(y_got[i] - y_ref[i]) <= 1e-12 * std::max(1.0, std::fabs(y_ref[i])));
  }
}
#endif

TEST_CASE("active kernel name is one of the known implementations") {
  const std::string name = kernels::active_kernel_name();
  const bool known = name == "scalar" || name == "avx2" || name == "neon";
  CHECK(known);
  // SOFTRANK_FORCE_SCALAR is read once at first dispatch, so this test can
  // only assert consistency with the already-latched capability state.
  if (kernels::CpuCapabilities::get().force_scalar) CHECK(name == "scalar");
}
