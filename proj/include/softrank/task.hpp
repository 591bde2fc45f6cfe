// Synthetic multi-view retrieval task. Each sample hides one "relevant"
// view (its concept plus light noise) among distractor views (other
// concepts plus heavier noise); the query carries the same concept with
// independent noise. The correct view is known by construction, so ranking
// quality is directly measurable.
#pragma once

#include <cstdint>
#include <vector>

#include "softrank/fusion.hpp"
#include "softrank/vec.hpp"

namespace softrank {

struct SyntheticTaskConfig {
  std::size_t n_views = 6;
  std::size_t d_v = 48;
  std::size_t d_t = 48;
  std::size_t d_e = 32;
  std::size_t n_concepts = 10;
  double noise_sigma = 0.3;
  double distractor_sigma = 1.0;
  std::size_t samples_train = 2000;
  std::size_t samples_eval = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Sample {
  ViewEmbeddings views;
  Vec64 query;
  std::size_t label;          // concept index
  std::size_t relevant_view;  // index of the concept-bearing view
};

struct SyntheticTask {
  SyntheticTaskConfig cfg;
  std::vector<Sample> train;
  std::vector<Sample> eval;
  Mat64 concepts;        // n_concepts x d_v, unit rows
  Mat64 query_concepts;  // n_concepts x d_t, unit rows
};

// Deterministic in cfg.seed. Concepts are unit-norm random vectors; when
// d_t == d_v the query side shares the visual concept vectors, otherwise a
// fixed random linear map carries them into the text dimension (rows
// re-normalized).
SyntheticTask generate_task(const SyntheticTaskConfig& cfg);

}  // namespace softrank
