#include "softrank/core_ops.hpp"

#include <algorithm>
#include <cmath>

#include "softrank/kernels.hpp"

namespace softrank {

double cosine_similarity(const Vec64& a, const Vec64& b) {
  if (a.len() != b.len()) {
    throw ShapeError(detail::msg("cosine_similarity: lengths ", a.len(), " vs ", b.len()));
  }
  const double na2 = kernels::dot(a.data(), a.data(), a.len());
  const double nb2 = kernels::dot(b.data(), b.data(), b.len());
  if (na2 == 0.0) throw ZeroNormError("cosine_similarity: first argument has zero norm");
  if (nb2 == 0.0) throw ZeroNormError("cosine_similarity: second argument has zero norm");
  const double s = kernels::dot(a.data(), b.data(), a.len()) / (std::sqrt(na2) * std::sqrt(nb2));
  return std::clamp(s, -1.0, 1.0);
}

void cosine_similarity_vjp(const Vec64& a, const Vec64& b, double upstream,
                           Vec64& da_acc, Vec64& db_acc) {
  const std::size_t n = a.len();
  const double na = std::sqrt(kernels::dot(a.data(), a.data(), n));
  const double nb = std::sqrt(kernels::dot(b.data(), b.data(), n));
  if (na == 0.0 || nb == 0.0) throw ZeroNormError("cosine_similarity_vjp: zero-norm input");
  const double dot_ab = kernels::dot(a.data(), b.data(), n);
  const double s = dot_ab / (na * nb);
  // ds/da = b/(|a||b|) - s * a/|a|^2, and symmetrically for b.
  kernels::axpy(upstream / (na * nb), b.data(), da_acc.data(), n);
  kernels::axpy(-upstream * s / (na * na), a.data(), da_acc.data(), n);
  kernels::axpy(upstream / (na * nb), a.data(), db_acc.data(), n);
  kernels::axpy(-upstream * s / (nb * nb), b.data(), db_acc.data(), n);
}

Vec64 softmax_temp(const Vec64& s, double tau) {
  if (tau <= 0.0) throw ParameterError(detail::msg("softmax_temp: tau must be > 0, got ", tau));
  const std::size_t n = s.len();
  Vec64 t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = s[i] / tau;
  double m = t[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, t[i]);
  Vec64 w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(t[i] - m);
    total += w[i];
  }
  for (std::size_t i = 0; i < n; ++i) w[i] /= total;
  return w;
}

Vec64 softmax_temp_vjp(const Vec64& w, double tau, const Vec64& upstream) {
  if (w.len() != upstream.len()) {
    throw ShapeError(detail::msg("softmax_temp_vjp: lengths ", w.len(), " vs ", upstream.len()));
  }
  const std::size_t n = w.len();
  double uw = 0.0;
  for (std::size_t i = 0; i < n; ++i) uw += upstream[i] * w[i];
  Vec64 ds(n);
  for (std::size_t i = 0; i < n; ++i) ds[i] = w[i] * (upstream[i] - uw) / tau;
  return ds;
}

Vec64 linear_project(const Vec64& x, const Mat64& w, const Vec64& b) {
  if (w.cols() != x.len() || w.rows() != b.len()) {
    throw ShapeError(detail::msg("linear_project: w is ", w.rows(), "x", w.cols(),
                                 ", x has ", x.len(), ", b has ", b.len()));
  }
  Vec64 out(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) {
    out[r] = kernels::dot(w.row(r), x.data(), w.cols()) + b[r];
  }
  return out;
}

void linear_project_vjp(const Vec64& x, const Mat64& w, const Vec64& dy,
                        Mat64& dw_acc, Vec64& db_acc, Vec64& dx_acc) {
  const std::size_t rows = w.rows(), cols = w.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    const double g = dy[r];
    db_acc[r] += g;
    kernels::axpy(g, x.data(), dw_acc.row(r), cols);
    kernels::axpy(g, w.row(r), dx_acc.data(), cols);
  }
}

void AffineBlockParams::check_shapes() const {
  const std::size_t d = weight.rows();
  if (bias.len() != d || norm_gain.len() != d || norm_bias.len() != d) {
    throw ShapeError(detail::msg("AffineBlockParams: inconsistent output dims (weight rows ", d,
                                 ", bias ", bias.len(), ", gain ", norm_gain.len(), ", norm_bias ",
                                 norm_bias.len(), ")"));
  }
}

AffineBlockGrads AffineBlockGrads::zeros_like(const AffineBlockParams& p) {
  AffineBlockGrads g;
  g.weight = Mat64(p.weight.rows(), p.weight.cols());
  g.bias = Vec64(p.bias.len());
  g.norm_gain = Vec64(p.norm_gain.len());
  g.norm_bias = Vec64(p.norm_bias.len());
  return g;
}

Vec64 affine_refine_fwd(const Vec64& x, const AffineBlockParams& p, AffineRefineCache& cache) {
  p.check_shapes();
  cache.y = linear_project(x, p.weight, p.bias);
  const std::size_t d = cache.y.len();
  double mu = 0.0;
  for (std::size_t i = 0; i < d; ++i) mu += cache.y[i];
  mu /= static_cast<double>(d);
  double var = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double c = cache.y[i] - mu;
    var += c * c;
  }
  var /= static_cast<double>(d);
  cache.floored = var < kVarianceFloor;
  cache.sigma = std::sqrt(cache.floored ? kVarianceFloor : var);
  cache.z = Vec64(d);
  cache.u = Vec64(d);
  Vec64 out(d);
  for (std::size_t i = 0; i < d; ++i) {
    cache.z[i] = (cache.y[i] - mu) / cache.sigma;
    cache.u[i] = p.norm_gain[i] * cache.z[i] + p.norm_bias[i];
    out[i] = cache.u[i] > 0.0 ? cache.u[i] : 0.0;
  }
  return out;
}

Vec64 affine_refine(const Vec64& x, const AffineBlockParams& p) {
  AffineRefineCache cache;
  return affine_refine_fwd(x, p, cache);
}

void affine_refine_vjp(const Vec64& x, const AffineBlockParams& p,
                       const AffineRefineCache& cache, const Vec64& dout,
                       AffineBlockGrads& g_acc, Vec64& dx_acc) {
  const std::size_t d = cache.y.len();
  Vec64 dz(d);
  double dz_mean = 0.0, dzz_mean = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double du = cache.u[i] > 0.0 ? dout[i] : 0.0;  // ReLU gate
    g_acc.norm_gain[i] += du * cache.z[i];
    g_acc.norm_bias[i] += du;
    dz[i] = du * p.norm_gain[i];
    dz_mean += dz[i];
    dzz_mean += dz[i] * cache.z[i];
  }
  dz_mean /= static_cast<double>(d);
  dzz_mean /= static_cast<double>(d);

  // Standardization backward. When the variance floor is active, sigma is a
  // constant and only the mean subtraction couples the coordinates.
  Vec64 dy(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (cache.floored) {
      dy[i] = (dz[i] - dz_mean) / cache.sigma;
    } else {
      dy[i] = (dz[i] - dz_mean - cache.z[i] * dzz_mean) / cache.sigma;
    }
  }
  linear_project_vjp(x, p.weight, dy, g_acc.weight, g_acc.bias, dx_acc);
}

}  // namespace softrank
