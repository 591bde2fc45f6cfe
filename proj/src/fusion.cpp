#include "softrank/fusion.hpp"

#include <cmath>

#include <json.hpp>

#include "softrank/kernels.hpp"
#include "softrank/rng.hpp"

namespace softrank {

void TgsspParams::check_shapes() const {
  refine.check_shapes();
  if (refine.weight.rows() != refine.weight.cols()) {
    throw ShapeError("TgsspParams: refine block must map D_v -> D_v");
  }
  if (vis_w.cols() != refine.weight.rows()) {
    throw ShapeError(detail::msg("TgsspParams: vis_proj expects input dim ", vis_w.cols(),
                                 " but refine outputs ", refine.weight.rows()));
  }
  if (vis_b.len() != vis_w.rows() || txt_b.len() != txt_w.rows()) {
    throw ShapeError("TgsspParams: projection bias lengths do not match weight rows");
  }
  if (vis_w.rows() != txt_w.rows()) {
    throw ShapeError(detail::msg("TgsspParams: shared embedding dim mismatch (vis ", vis_w.rows(),
                                 " vs txt ", txt_w.rows(), ")"));
  }
}

TgsspGrads TgsspGrads::zeros_like(const TgsspParams& p) {
  TgsspGrads g;
  g.refine = AffineBlockGrads::zeros_like(p.refine);
  g.vis_w = Mat64(p.vis_w.rows(), p.vis_w.cols());
  g.vis_b = Vec64(p.vis_b.len());
  g.txt_w = Mat64(p.txt_w.rows(), p.txt_w.cols());
  g.txt_b = Vec64(p.txt_b.len());
  return g;
}

Vec64 similarity_scores(const std::vector<Vec64>& v_proj, const Vec64& t_proj) {
  if (v_proj.empty()) throw ParameterError("similarity_scores: need at least one view");
  Vec64 s(v_proj.size());
  for (std::size_t i = 0; i < v_proj.size(); ++i) {
    if (v_proj[i].len() != t_proj.len()) {
      throw ShapeError(detail::msg("similarity_scores: view ", i, " has dim ", v_proj[i].len(),
                                   ", query has ", t_proj.len()));
    }
    try {
      s[i] = cosine_similarity(v_proj[i], t_proj);
    } catch (const ZeroNormError&) {
      const bool view_zero =
          kernels::dot(v_proj[i].data(), v_proj[i].data(), v_proj[i].len()) == 0.0;
      throw ZeroNormError(view_zero
                              ? detail::msg("similarity_scores: projected view ", i, " has zero norm")
                              : std::string("similarity_scores: projected query has zero norm"));
    }
  }
  return s;
}

namespace {

struct ForwardCache {
  std::vector<AffineRefineCache> refine_caches;
  std::vector<Vec64> refined;  // affine_refine outputs
  std::vector<Vec64> v_proj;   // projected views
  Vec64 t_proj;
  Vec64 scores;
  Vec64 weights;
};

FusionOutput fuse_impl(const ViewEmbeddings& views, const Vec64& query, const TgsspParams& params,
                       ForwardCache* cache) {
  params.check_shapes();
  if (views.empty()) throw ParameterError("fuse: need at least one view");
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i].len() != params.d_v()) {
      throw ShapeError(detail::msg("fuse: view ", i, " has dim ", views[i].len(), ", expected ",
                                   params.d_v()));
    }
  }
  if (query.len() != params.d_t()) {
    throw ShapeError(detail::msg("fuse: query has dim ", query.len(), ", expected ", params.d_t()));
  }

  const std::size_t n = views.size();
  std::vector<AffineRefineCache> refine_caches(n);
  std::vector<Vec64> refined(n), v_proj(n);
  for (std::size_t i = 0; i < n; ++i) {
    refined[i] = affine_refine_fwd(views[i], params.refine, refine_caches[i]);
    v_proj[i] = linear_project(refined[i], params.vis_w, params.vis_b);
  }
  Vec64 t_proj = linear_project(query, params.txt_w, params.txt_b);
  Vec64 scores = similarity_scores(v_proj, t_proj);
  Vec64 weights = strategy_weights(params.strategy, scores);

  Vec64 fused(params.d_e(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    kernels::axpy(weights[i], v_proj[i].data(), fused.data(), fused.len());
  }

  if (cache != nullptr) {
    cache->refine_caches = std::move(refine_caches);
    cache->refined = std::move(refined);
    cache->v_proj = std::move(v_proj);
    cache->t_proj = std::move(t_proj);
    cache->scores = scores;
    cache->weights = weights;
  }
  return FusionOutput{std::move(fused), std::move(weights), std::move(scores)};
}

}  // namespace

FusionOutput fuse(const ViewEmbeddings& views, const Vec64& query, const TgsspParams& params) {
  return fuse_impl(views, query, params, nullptr);
}

FuseVjpResult fuse_vjp(const ViewEmbeddings& views, const Vec64& query, const TgsspParams& params,
                       const Vec64& upstream) {
  ForwardCache c;
  fuse_impl(views, query, params, &c);
  if (upstream.len() != params.d_e()) {
    throw ShapeError(detail::msg("fuse_vjp: upstream has dim ", upstream.len(), ", expected ",
                                 params.d_e()));
  }

  const std::size_t n = views.size();
  const std::size_t d_e = params.d_e();

  FuseVjpResult out;
  out.grads = TgsspGrads::zeros_like(params);
  out.d_views.assign(n, Vec64(params.d_v(), 0.0));
  out.d_query = Vec64(params.d_t(), 0.0);

  // Pooling: fused = sum_i w_i v_i'  =>  dw_i = <u, v_i'>, dv_i' = w_i u.
  Vec64 d_weights(n);
  std::vector<Vec64> d_vproj(n, Vec64(d_e, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    d_weights[i] = kernels::dot(upstream.data(), c.v_proj[i].data(), d_e);
    kernels::axpy(c.weights[i], upstream.data(), d_vproj[i].data(), d_e);
  }

  // Strategy: dLoss/ds from dLoss/dw.
  const Vec64 d_scores = strategy_vjp(params.strategy, c.scores, d_weights);

  // Cosine scores: accumulate into the projected views and the projected query.
  Vec64 d_tproj(d_e, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (d_scores[i] != 0.0) {
      cosine_similarity_vjp(c.v_proj[i], c.t_proj, d_scores[i], d_vproj[i], d_tproj);
    }
  }

  // Text projection.
  linear_project_vjp(query, params.txt_w, d_tproj, out.grads.txt_w, out.grads.txt_b, out.d_query);

  // Visual projection and refine block, per view.
  for (std::size_t i = 0; i < n; ++i) {
    Vec64 d_refined(params.d_v(), 0.0);
    linear_project_vjp(c.refined[i], params.vis_w, d_vproj[i], out.grads.vis_w, out.grads.vis_b,
                       d_refined);
    affine_refine_vjp(views[i], params.refine, c.refine_caches[i], d_refined, out.grads.refine,
                      out.d_views[i]);
  }
  return out;
}

TgsspParams init_params(std::size_t d_v, std::size_t d_t, std::size_t d_e, std::uint64_t seed) {
  if (d_v == 0 || d_t == 0 || d_e == 0) throw ParameterError("init_params: dims must be >= 1");
  Rng rng(seed);
  // Draw order is part of the determinism contract: refine.weight first,
  // then vis_proj.weight, then txt_proj.weight (row-major within each).
  auto fill_uniform = [&rng](Mat64& m, std::size_t fan_in, std::size_t fan_out) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < m.rows() * m.cols(); ++i) {
      m.data()[i] = rng.uniform_in(-a, a);
    }
  };
  TgsspParams p;
  p.refine.weight = Mat64(d_v, d_v);
  fill_uniform(p.refine.weight, d_v, d_v);
  p.refine.bias = Vec64(d_v, 0.0);
  p.refine.norm_gain = Vec64(d_v, 1.0);
  p.refine.norm_bias = Vec64(d_v, 0.0);
  p.vis_w = Mat64(d_e, d_v);
  fill_uniform(p.vis_w, d_v, d_e);
  p.vis_b = Vec64(d_e, 0.0);
  p.txt_w = Mat64(d_e, d_t);
  fill_uniform(p.txt_w, d_t, d_e);
  p.txt_b = Vec64(d_e, 0.0);
  return p;
}

std::string params_to_json(const TgsspParams& params) {
  nlohmann::ordered_json j;
  j["dims"] = {{"d_v", params.d_v()}, {"d_t", params.d_t()}, {"d_e", params.d_e()}};
  j["refine.weight"] = params.refine.weight.raw();
  j["refine.bias"] = params.refine.bias.raw();
  j["refine.norm_gain"] = params.refine.norm_gain.raw();
  j["refine.norm_bias"] = params.refine.norm_bias.raw();
  j["vis_proj.weight"] = params.vis_w.raw();
  j["vis_proj.bias"] = params.vis_b.raw();
  j["txt_proj.weight"] = params.txt_w.raw();
  j["txt_proj.bias"] = params.txt_b.raw();
  return j.dump(2);
}

TgsspParams params_from_json(const std::string& text, const StrategyConfig& strategy) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(detail::msg("params_from_json: invalid JSON: ", e.what()));
  }
  auto require = [&j](const char* key) -> const nlohmann::json& {
    if (!j.contains(key)) throw SchemaError(detail::msg("params_from_json: missing key '", key, "'"));
    return j.at(key);
  };
  const auto& dims = require("dims");
  const auto d_v = dims.at("d_v").get<std::size_t>();
  const auto d_t = dims.at("d_t").get<std::size_t>();
  const auto d_e = dims.at("d_e").get<std::size_t>();
  auto vec = [&require](const char* key, std::size_t len) {
    auto xs = require(key).get<std::vector<double>>();
    if (xs.size() != len) {
      throw SchemaError(detail::msg("params_from_json: '", key, "' has ", xs.size(),
                                    " entries, expected ", len));
    }
    return Vec64::from(std::move(xs));
  };
  auto mat = [&require](const char* key, std::size_t rows, std::size_t cols) {
    auto xs = require(key).get<std::vector<double>>();
    return Mat64::from(rows, cols, std::move(xs));
  };
  TgsspParams p;
  p.refine.weight = mat("refine.weight", d_v, d_v);
  p.refine.bias = vec("refine.bias", d_v);
  p.refine.norm_gain = vec("refine.norm_gain", d_v);
  p.refine.norm_bias = vec("refine.norm_bias", d_v);
  p.vis_w = mat("vis_proj.weight", d_e, d_v);
  p.vis_b = vec("vis_proj.bias", d_e);
  p.txt_w = mat("txt_proj.weight", d_e, d_t);
  p.txt_b = vec("txt_proj.bias", d_e);
  p.strategy = strategy;
  p.check_shapes();
  return p;
}

}  // namespace softrank
