// Experiment drivers: the strategy ablation (train every ranking strategy
// on identical data/init/batch order and compare), and the gradient-check
// suite that sweeps all strategy backward passes plus the full fusion
// backward against finite differences.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "softrank/soft_rank.hpp"
#include "softrank/task.hpp"
#include "softrank/train.hpp"

namespace softrank {

struct StrategyOutcome {
  StrategyKind kind = StrategyKind::SoftSort;
  bool trained = false;  // all repetitions finished without a training abort
  std::string error;     // first abort message, if any
  std::vector<double> per_seed_accuracy;  // completed repetitions only
  std::vector<double> per_seed_hit_rate;
  double accuracy = 0.0;  // mean over completed repetitions
  double top_view_hit_rate = 0.0;
  FlopCount flops;                // per weight computation at n = n_views
  double wall_time_seconds = 0.0;  // console-only; never serialized
};

// One accuracy comparison with a required margin.
struct MarginCheck {
  std::string name;
  double value = 0.0;     // measured delta
  double required = 0.0;  // passes iff value >= required
  bool passed = false;
};

struct AblationAssertions {
  // accuracy(strategy) - accuracy(uniform) >= 0.10 for each guided,
  // differentiable strategy present in the run.
  std::vector<MarginCheck> guided_vs_uniform;
  bool has_softsort_vs_hard = false;
  MarginCheck softsort_vs_hard;  // accuracy(softsort) - accuracy(hardtop1) >= 0
  bool all_passed = true;        // over the checks actually computed
};

struct AblationReport {
  SyntheticTaskConfig task_cfg;
  TrainConfig train_cfg;
  std::vector<std::uint64_t> seeds;  // repetition base seeds
  std::vector<StrategyOutcome> strategies;
  AblationAssertions assertions;
};

// Runs n_seeds repetitions. Repetition r uses task seed cfg.seed + r and
// train seed tcfg.seed + r, so within a repetition every strategy sees the
// same dataset, the same parameter init, and the same batch order. A
// TrainingError aborts only that (strategy, repetition) cell; the run
// continues and the abort is recorded. Progress lines go to `progress`
// when non-null.
AblationReport run_ablation(const SyntheticTaskConfig& cfg, const TrainConfig& tcfg,
                            const std::vector<StrategyKind>& kinds, std::size_t n_seeds = 3,
                            std::ostream* progress = nullptr);

struct GradSuiteGroup {
  std::string name;  // e.g. "softsort top-row", "fusion sinkhornsort"
  double max_rel_error = 0.0;
  std::size_t checks = 0;
  bool passed = true;
};

struct GradSuiteReport {
  std::vector<GradSuiteGroup> groups;
  std::size_t total_checks = 0;
  double worst = 0.0;
  std::string worst_group;
  double tol = 0.0;
  bool passed = true;
};

// Finite-difference sweep: every strategy VJP (SoftSort in both extraction
// modes, Sinkhorn at 10 and 50 iterations, TopKSoft, SimpleSoftmax,
// HardTop1 against its straight-through surrogate, UniformPooling) at view
// counts {2, 6, 8}, plus the end-to-end fusion backward over all trainable
// parameters, views, and query. n_seeds independent random points per
// group; passes iff every relative error stays below tol.
GradSuiteReport grad_check_suite(std::size_t n_seeds = 20, double tol = 1e-4);

}  // namespace softrank
