// Text-guided fusion pipeline: refine each view, project both modalities
// into a shared embedding space, score views against the query by cosine,
// turn scores into simplex weights via a ranking strategy, and pool the
// projected views. Ships the full analytic backward pass for every
// trainable parameter plus the inputs.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softrank/core_ops.hpp"
#include "softrank/soft_rank.hpp"
#include "softrank/vec.hpp"

namespace softrank {

// N_v view vectors of uniform dimension D_v.
using ViewEmbeddings = std::vector<Vec64>;

struct TgsspParams {
  AffineBlockParams refine;  // D_v -> D_v
  Mat64 vis_w;               // D_e x D_v
  Vec64 vis_b;               // D_e
  Mat64 txt_w;               // D_e x D_t
  Vec64 txt_b;               // D_e
  StrategyConfig strategy;

  std::size_t d_v() const { return refine.weight.cols(); }
  std::size_t d_t() const { return txt_w.cols(); }
  std::size_t d_e() const { return vis_w.rows(); }
  void check_shapes() const;
};

struct TgsspGrads {
  AffineBlockGrads refine;
  Mat64 vis_w;
  Vec64 vis_b;
  Mat64 txt_w;
  Vec64 txt_b;

  static TgsspGrads zeros_like(const TgsspParams& p);
};

struct FusionOutput {
  Vec64 fused;    // D_e
  Vec64 weights;  // N_v simplex vector
  Vec64 scores;   // N_v cosine scores
};

struct FuseVjpResult {
  TgsspGrads grads;
  std::vector<Vec64> d_views;
  Vec64 d_query;
};

// s_i = cosine(v_proj[i], t_proj). Zero-norm inputs raise ZeroNormError
// naming the offending view.
Vec64 similarity_scores(const std::vector<Vec64>& v_proj, const Vec64& t_proj);

// Forward pass: v_i' = vis_proj(affine_refine(v_i)), t' = txt_proj(query),
// s = similarity_scores, w = strategy(s), fused = sum_i w_i v_i'.
FusionOutput fuse(const ViewEmbeddings& views, const Vec64& query, const TgsspParams& params);

// Backward pass: exact gradients through pooling, the ranking strategy
// (via strategy_vjp — note HardTop1 uses its straight-through surrogate),
// cosine scores, both projections, and the refine block.
FuseVjpResult fuse_vjp(const ViewEmbeddings& views, const Vec64& query,
                       const TgsspParams& params, const Vec64& upstream);

// Projection/refine weights from uniform(-a, a) with a = sqrt(6/(fan_in +
// fan_out)); biases zero; norm gains one. Deterministic in seed.
TgsspParams init_params(std::size_t d_v, std::size_t d_t, std::size_t d_e, std::uint64_t seed);

// Flat key -> row-major array JSON snapshot of the trainable parameters
// (keys refine.weight, refine.bias, refine.norm_gain, refine.norm_bias,
// vis_proj.weight, vis_proj.bias, txt_proj.weight, txt_proj.bias) with the
// dimensions recorded alongside. The strategy config is not part of a
// snapshot; supply it when loading.
std::string params_to_json(const TgsspParams& params);
TgsspParams params_from_json(const std::string& text, const StrategyConfig& strategy);

}  // namespace softrank
