#include "softrank/train.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

#include "softrank/core_ops.hpp"
#include "softrank/errors.hpp"
#include "softrank/rng.hpp"

namespace softrank {
namespace {

struct Span {
  double* p;
  std::size_t n;
};

void collect(std::vector<Span>& out, Mat64& m) { out.push_back({m.data(), m.rows() * m.cols()}); }
void collect(std::vector<Span>& out, Vec64& v) { out.push_back({v.data(), v.len()}); }

// The optimizer walks parameters and gradients as flat spans; both lists
// must enumerate fields in the same order.
std::vector<Span> param_spans(TgsspParams& p, Mat64& cls_w, Vec64& cls_b) {
  std::vector<Span> s;
  collect(s, p.refine.weight);
  collect(s, p.refine.bias);
  collect(s, p.refine.norm_gain);
  collect(s, p.refine.norm_bias);
  collect(s, p.vis_w);
  collect(s, p.vis_b);
  collect(s, p.txt_w);
  collect(s, p.txt_b);
  collect(s, cls_w);
  collect(s, cls_b);
  return s;
}

std::vector<Span> tgssp_grad_spans(TgsspGrads& g) {
  std::vector<Span> s;
  collect(s, g.refine.weight);
  collect(s, g.refine.bias);
  collect(s, g.refine.norm_gain);
  collect(s, g.refine.norm_bias);
  collect(s, g.vis_w);
  collect(s, g.vis_b);
  collect(s, g.txt_w);
  collect(s, g.txt_b);
  return s;
}

std::vector<Span> grad_spans(TgsspGrads& g, Mat64& dcls_w, Vec64& dcls_b) {
  std::vector<Span> s = tgssp_grad_spans(g);
  collect(s, dcls_w);
  collect(s, dcls_b);
  return s;
}

void zero_spans(std::vector<Span>& spans) {
  for (auto& sp : spans)
    for (std::size_t i = 0; i < sp.n; ++i) sp.p[i] = 0.0;
}

void add_grads(std::vector<Span>& acc, std::vector<Span>& delta) {
  for (std::size_t k = 0; k < acc.size(); ++k)
    for (std::size_t i = 0; i < acc[k].n; ++i) acc[k].p[i] += delta[k].p[i];
}

std::size_t argmax_lowest(const Vec64& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.len(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace

void TrainConfig::validate() const {
  if (steps == 0) throw ParameterError("steps must be at least 1");
  if (batch == 0) throw ParameterError("batch must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ParameterError("learning_rate must be finite and positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ParameterError("adaptive-moment betas must lie in [0, 1)");
  if (!(eps > 0.0)) throw ParameterError("eps must be positive");
}

TrainedModel train_model(const SyntheticTask& task, const StrategyConfig& strategy,
                         const TrainConfig& tcfg) {
  tcfg.validate();
  const auto& cfg = task.cfg;
  strategy.validate(cfg.n_views);
  if (task.train.empty()) throw ParameterError("task has no training samples");

  TrainedModel model;
  model.params = init_params(cfg.d_v, cfg.d_t, cfg.d_e, derive_seed(tcfg.seed, 0));
  model.params.strategy = strategy;
  // Zero classifier start: the first-batch loss is exactly ln(n_concepts),
  // which the harness tests lean on.
  model.cls_w = Mat64(cfg.n_concepts, cfg.d_e);
  model.cls_b = Vec64(cfg.n_concepts);

  Rng batch_rng(derive_seed(tcfg.seed, 1));

  TgsspGrads acc = TgsspGrads::zeros_like(model.params);
  Mat64 dcls_w(cfg.n_concepts, cfg.d_e);
  Vec64 dcls_b(cfg.n_concepts);

  auto params = param_spans(model.params, model.cls_w, model.cls_b);
  auto grads = grad_spans(acc, dcls_w, dcls_b);

  std::size_t total = 0;
  for (const auto& sp : params) total += sp.n;
  std::vector<double> m1(total, 0.0), m2(total, 0.0);

  const double inv_batch = 1.0 / static_cast<double>(tcfg.batch);

  for (std::size_t step = 0; step < tcfg.steps; ++step) {
    zero_spans(grads);
    double loss = 0.0;

    for (std::size_t b = 0; b < tcfg.batch; ++b) {
      const Sample& sample = task.train[batch_rng.below(task.train.size())];
      FusionOutput out = fuse(sample.views, sample.query, model.params);
      Vec64 logits = linear_project(out.fused, model.cls_w, model.cls_b);
      Vec64 prob = softmax_temp(logits, 1.0);
      loss -= std::log(prob[sample.label]);

      Vec64 dlogits = prob;
      dlogits[sample.label] -= 1.0;
      for (std::size_t c = 0; c < dlogits.len(); ++c) dlogits[c] *= inv_batch;

      Vec64 dfused(cfg.d_e);
      linear_project_vjp(out.fused, model.cls_w, dlogits, dcls_w, dcls_b, dfused);

      // Classifier grads were accumulated in place by linear_project_vjp;
      // the pipeline grads come back per sample and are summed here.
      FuseVjpResult back = fuse_vjp(sample.views, sample.query, model.params, dfused);
      auto delta = tgssp_grad_spans(back.grads);
      auto acc_view = tgssp_grad_spans(acc);
      add_grads(acc_view, delta);
    }

    loss *= inv_batch;
    if (!std::isfinite(loss))
      throw TrainingError(detail::msg("training diverged: non-finite loss at step ", step));
    if (step % 10 == 0 || step + 1 == tcfg.steps) model.loss_curve.emplace_back(step, loss);

    if (tcfg.optimizer == Optimizer::AdaptiveMoment) {
      const double t = static_cast<double>(step + 1);
      const double c1 = 1.0 - std::pow(tcfg.beta1, t);
      const double c2 = 1.0 - std::pow(tcfg.beta2, t);
      std::size_t off = 0;
      for (std::size_t k = 0; k < params.size(); ++k) {
        for (std::size_t i = 0; i < params[k].n; ++i, ++off) {
          const double g = grads[k].p[i];
          m1[off] = tcfg.beta1 * m1[off] + (1.0 - tcfg.beta1) * g;
          m2[off] = tcfg.beta2 * m2[off] + (1.0 - tcfg.beta2) * g * g;
          params[k].p[i] -=
              tcfg.learning_rate * (m1[off] / c1) / (std::sqrt(m2[off] / c2) + tcfg.eps);
        }
      }
    } else {
      for (std::size_t k = 0; k < params.size(); ++k)
        for (std::size_t i = 0; i < params[k].n; ++i)
          params[k].p[i] -= tcfg.learning_rate * grads[k].p[i];
    }
  }

  return model;
}

Vec64 classify(const Sample& sample, const TrainedModel& model) {
  FusionOutput out = fuse(sample.views, sample.query, model.params);
  return linear_project(out.fused, model.cls_w, model.cls_b);
}

EvalResult evaluate(const std::vector<Sample>& samples, const TrainedModel& model) {
  if (samples.empty()) throw ParameterError("evaluate: empty sample set");
  std::size_t correct = 0, hits = 0;
  for (const Sample& sample : samples) {
    FusionOutput out = fuse(sample.views, sample.query, model.params);
    Vec64 logits = linear_project(out.fused, model.cls_w, model.cls_b);
    if (argmax_lowest(logits) == sample.label) ++correct;
    if (argmax_lowest(out.weights) == sample.relevant_view) ++hits;
  }
  const double n = static_cast<double>(samples.size());
  return EvalResult{static_cast<double>(correct) / n, static_cast<double>(hits) / n};
}

}  // namespace softrank
