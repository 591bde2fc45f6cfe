// Core numeric operations shared by the ranking strategies and the fusion
// pipeline: cosine similarity, temperature softmax, linear projection, and
// the affine-refine block (affine map + per-feature standardization + ReLU).
// Every operation ships with its hand-derived vector-Jacobian product; the
// *_vjp functions accumulate into their gradient outputs so callers can sum
// contributions across views and batch elements.
#pragma once

#include "softrank/vec.hpp"

namespace softrank {

// Variance floor applied before the square root in the standardization step;
// keeps near-constant vectors from dividing by ~0.
inline constexpr double kVarianceFloor = 1e-6;

// --- cosine similarity (the score function) ---------------------------------

// <a/|a|, b/|b|>, clamped to [-1, 1]. Throws ZeroNormError when either norm
// is zero — a silent 0 would poison the ranking downstream.
double cosine_similarity(const Vec64& a, const Vec64& b);

// Accumulates d(upstream * cos(a,b))/da and /db into da_acc / db_acc.
void cosine_similarity_vjp(const Vec64& a, const Vec64& b, double upstream,
                           Vec64& da_acc, Vec64& db_acc);

// --- temperature softmax -----------------------------------------------------

// softmax(s / tau), computed with max subtraction for stability.
Vec64 softmax_temp(const Vec64& s, double tau);

// Backward through softmax_temp given its forward output w:
// ds_j = (w_j / tau) * (u_j - sum_k u_k w_k).
Vec64 softmax_temp_vjp(const Vec64& w, double tau, const Vec64& upstream);

// --- linear projection -------------------------------------------------------

// w * x + b with w of shape (d_out x d_in).
Vec64 linear_project(const Vec64& x, const Mat64& w, const Vec64& b);

// Backward: given dy over the output, accumulates dW, db, dx.
void linear_project_vjp(const Vec64& x, const Mat64& w, const Vec64& dy,
                        Mat64& dw_acc, Vec64& db_acc, Vec64& dx_acc);

// --- affine refine block -----------------------------------------------------

struct AffineBlockParams {
  Mat64 weight;     // (d_out x d_in)
  Vec64 bias;       // d_out
  Vec64 norm_gain;  // d_out
  Vec64 norm_bias;  // d_out

  void check_shapes() const;
};

struct AffineBlockGrads {
  Mat64 weight;
  Vec64 bias;
  Vec64 norm_gain;
  Vec64 norm_bias;

  static AffineBlockGrads zeros_like(const AffineBlockParams& p);
};

// Intermediates captured by the forward pass and consumed by the backward.
struct AffineRefineCache {
  Vec64 y;       // weight*x + bias
  Vec64 z;       // standardized y
  Vec64 u;       // gain*z + norm_bias (pre-ReLU)
  double sigma = 0.0;
  bool floored = false;  // variance floor active
};

// ReLU(norm_gain * standardize(weight*x + bias) + norm_bias), where
// standardize subtracts the feature mean and divides by the feature
// standard deviation (variance floored at kVarianceFloor).
Vec64 affine_refine(const Vec64& x, const AffineBlockParams& p);

// Forward that also fills the cache needed by affine_refine_vjp.
Vec64 affine_refine_fwd(const Vec64& x, const AffineBlockParams& p,
                        AffineRefineCache& cache);

// Backward; accumulates parameter gradients and dx.
void affine_refine_vjp(const Vec64& x, const AffineBlockParams& p,
                       const AffineRefineCache& cache, const Vec64& dout,
                       AffineBlockGrads& g_acc, Vec64& dx_acc);

}  // namespace softrank
