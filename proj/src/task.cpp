#include "softrank/task.hpp"

#include <cmath>
#include <cstddef>

#include "softrank/errors.hpp"
#include "softrank/rng.hpp"

namespace softrank {
namespace {

Vec64 normalized(Vec64 v) {
  double sq = 0.0;
  for (std::size_t i = 0; i < v.len(); ++i) sq += v[i] * v[i];
  const double n = std::sqrt(sq);
  if (n == 0.0) throw ZeroNormError("degenerate concept vector (zero norm)");
  for (std::size_t i = 0; i < v.len(); ++i) v[i] /= n;
  return v;
}

Vec64 gaussian_vec(Rng& rng, std::size_t d) {
  Vec64 v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = rng.gaussian();
  return v;
}

// A distractor concept index: uniform over {0..n_concepts-1} \ {label}.
std::size_t draw_distractor(Rng& rng, std::size_t n_concepts, std::size_t label) {
  const std::size_t r = rng.below(n_concepts - 1);
  return r < label ? r : r + 1;
}

std::vector<Sample> draw_samples(const SyntheticTaskConfig& cfg, const Mat64& concepts,
                                 const Mat64& query_concepts, std::size_t count, Rng& rng) {
  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t label = rng.below(cfg.n_concepts);
    const std::size_t relevant = rng.below(cfg.n_views);
    ViewEmbeddings views;
    views.reserve(cfg.n_views);
    for (std::size_t i = 0; i < cfg.n_views; ++i) {
      Vec64 v(cfg.d_v);
      if (i == relevant) {
        for (std::size_t j = 0; j < cfg.d_v; ++j)
          v[j] = concepts.at(label, j) + cfg.noise_sigma * rng.gaussian();
      } else {
        // Independent draw per distractor view; repeats across views are allowed.
        const std::size_t other = draw_distractor(rng, cfg.n_concepts, label);
        for (std::size_t j = 0; j < cfg.d_v; ++j)
          v[j] = concepts.at(other, j) + cfg.distractor_sigma * rng.gaussian();
      }
      views.push_back(std::move(v));
    }
    Vec64 q(cfg.d_t);
    for (std::size_t j = 0; j < cfg.d_t; ++j)
      q[j] = query_concepts.at(label, j) + cfg.noise_sigma * rng.gaussian();
    out.push_back(Sample{std::move(views), std::move(q), label, relevant});
  }
  return out;
}

}  // namespace

void SyntheticTaskConfig::validate() const {
  if (n_views == 0) throw ParameterError("n_views must be at least 1");
  if (d_v == 0 || d_t == 0 || d_e == 0)
    throw ParameterError("embedding dimensions must be at least 1");
  if (n_concepts == 0) throw ParameterError("n_concepts must be at least 1");
  if (n_views > 1 && n_concepts < 2)
    throw ParameterError("distractor views need at least 2 concepts");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw ParameterError("noise_sigma must be finite and non-negative");
  if (!(distractor_sigma >= 0.0) || !std::isfinite(distractor_sigma))
    throw ParameterError("distractor_sigma must be finite and non-negative");
  if (!(noise_sigma < distractor_sigma))
    throw ParameterError(detail::msg("noise_sigma (", noise_sigma,
                                     ") must be below distractor_sigma (", distractor_sigma,
                                     "): the relevant view has to be the cleaner one"));
  if (samples_train == 0 || samples_eval == 0)
    throw ParameterError("sample counts must be at least 1");
}

SyntheticTask generate_task(const SyntheticTaskConfig& cfg) {
  cfg.validate();

  // Independent streams so that, e.g., changing samples_train does not
  // shift the concept vectors.
  Rng concept_rng(derive_seed(cfg.seed, 0));
  Rng map_rng(derive_seed(cfg.seed, 1));
  Rng train_rng(derive_seed(cfg.seed, 2));
  Rng eval_rng(derive_seed(cfg.seed, 3));

  Mat64 concepts(cfg.n_concepts, cfg.d_v);
  for (std::size_t c = 0; c < cfg.n_concepts; ++c) {
    Vec64 v = normalized(gaussian_vec(concept_rng, cfg.d_v));
    for (std::size_t j = 0; j < cfg.d_v; ++j) concepts.at(c, j) = v[j];
  }

  Mat64 query_concepts(cfg.n_concepts, cfg.d_t);
  if (cfg.d_t == cfg.d_v) {
    query_concepts = concepts;
  } else {
    // Fixed random map into the text dimension, rows re-normalized so both
    // modalities live on the unit sphere.
    Mat64 map(cfg.d_t, cfg.d_v);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.d_v));
    for (std::size_t r = 0; r < cfg.d_t; ++r)
      for (std::size_t c = 0; c < cfg.d_v; ++c) map.at(r, c) = scale * map_rng.gaussian();
    for (std::size_t c = 0; c < cfg.n_concepts; ++c) {
      Vec64 mapped(cfg.d_t);
      for (std::size_t r = 0; r < cfg.d_t; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < cfg.d_v; ++j) acc += map.at(r, j) * concepts.at(c, j);
        mapped[r] = acc;
      }
      mapped = normalized(std::move(mapped));
      for (std::size_t r = 0; r < cfg.d_t; ++r) query_concepts.at(c, r) = mapped[r];
    }
  }

  SyntheticTask task;
  task.cfg = cfg;
  task.concepts = std::move(concepts);
  task.query_concepts = std::move(query_concepts);
  task.train = draw_samples(cfg, task.concepts, task.query_concepts, cfg.samples_train, train_rng);
  task.eval = draw_samples(cfg, task.concepts, task.query_concepts, cfg.samples_eval, eval_rng);
  return task;
}

}  // namespace softrank
