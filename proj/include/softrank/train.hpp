// Trains the fusion pipeline plus a linear classifier head on a synthetic
// task with cross-entropy loss, backpropagating through the full pipeline
// (classifier -> pooling -> ranking strategy -> cosine -> projections ->
// refine block).
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "softrank/fusion.hpp"
#include "softrank/task.hpp"

namespace softrank {

enum class Optimizer { PlainGradientDescent, AdaptiveMoment };

struct TrainConfig {
  std::size_t steps = 500;
  std::size_t batch = 16;
  double learning_rate = 1e-2;
  Optimizer optimizer = Optimizer::AdaptiveMoment;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainedModel {
  TgsspParams params;
  Mat64 cls_w;  // n_concepts x d_e, zero-initialized
  Vec64 cls_b;  // n_concepts
  // (step, batch loss before the update), recorded every 10 steps and at
  // the final step.
  std::vector<std::pair<std::size_t, double>> loss_curve;
};

// Deterministic in tcfg.seed (parameter init and batch sampling use
// independent derived streams). Throws TrainingError, naming the step, if
// the loss leaves the finite range.
TrainedModel train_model(const SyntheticTask& task, const StrategyConfig& strategy,
                         const TrainConfig& tcfg);

struct EvalResult {
  double accuracy;           // argmax of classifier logits vs label
  double top_view_hit_rate;  // argmax of fusion weights vs relevant view
};

EvalResult evaluate(const std::vector<Sample>& samples, const TrainedModel& model);

// Classifier logits for one sample (d_e-dim fused vector -> n_concepts).
Vec64 classify(const Sample& sample, const TrainedModel& model);

}  // namespace softrank
