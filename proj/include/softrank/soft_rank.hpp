// The six ranking strategies: forward weighting, analytic vector-Jacobian
// products, and operation-level FLOP accounting.
//
// Score vectors are cosine similarities (one per view). Each strategy maps
// scores to a simplex weight vector; SoftSort and SinkhornSort construct a
// relaxed permutation matrix first and reduce it to weights via a
// configurable extraction mode (TopRow by default).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softrank/vec.hpp"

namespace softrank {

enum class StrategyKind {
  SoftSort,
  SinkhornSort,
  TopKSoft,
  SimpleSoftmax,
  HardTop1,
  UniformPooling,
};

// How a relaxed permutation matrix becomes a weight vector.
// TopRow:    w = row 0 (the soft assignment of the top rank).
// RankDecay: w_j proportional to sum_r decay^r * p[r][j], renormalized.
enum class WeightMode { TopRow, RankDecay };

struct StrategyConfig {
  StrategyKind kind = StrategyKind::SoftSort;
  double tau = 1.0;
  std::size_t top_k = 3;          // TopKSoft only
  std::size_t sinkhorn_iters = 50;
  WeightMode weight_mode = WeightMode::TopRow;
  double rank_decay = 0.5;        // RankDecay mode only; must be in (0,1]

  // Validates fields against the score length n (top_k <= n, tau > 0, ...).
  void validate(std::size_t n) const;
};

struct FlopCount {
  std::uint64_t additions = 0;       // additions and subtractions
  std::uint64_t multiplications = 0;
  std::uint64_t exponentials = 0;
  std::uint64_t comparisons = 0;     // includes |x| and max/sort comparisons
  std::uint64_t divisions = 0;

  std::uint64_t total() const {
    return additions + multiplications + exponentials + comparisons + divisions;
  }
};

// --- forward operators -------------------------------------------------------

// Relaxed permutation: row r = softmax_j(-|d_r - s_j| / tau) with d the
// scores sorted descending. Rows are probability distributions; as tau -> 0
// on distinct scores the matrix approaches the exact sort permutation.
Mat64 soft_sort(const Vec64& s, double tau);

// Same cost matrix as soft_sort, but normalized toward double stochasticity:
// `iters` rounds of (row-normalize, column-normalize), then one final row
// normalization so rows sum to 1 exactly.
Mat64 sinkhorn_sort(const Vec64& s, double tau, std::size_t iters);

// Softmax over the k largest scores (ties broken by lowest index), zero
// elsewhere. k = n reduces exactly to simple_softmax.
Vec64 topk_soft(const Vec64& s, double tau, std::size_t k);

// softmax(s / tau).
Vec64 simple_softmax(const Vec64& s, double tau);

// One-hot at argmax (ties broken by lowest index).
Vec64 hard_top1(const Vec64& s);

// All entries 1/n.
Vec64 uniform_weights(std::size_t n);

// Matrix -> weight-vector reduction (see WeightMode).
Vec64 weights_from_relaxed_perm(const Mat64& p, WeightMode mode, double rank_decay);

// --- strategy dispatch (forward + backward) ----------------------------------

// Weight vector for the configured strategy. For SoftSort in TopRow mode
// only row 0 of the relaxed permutation is materialized (the other rows
// cannot influence the output), which is also what flop_count charges.
Vec64 strategy_weights(const StrategyConfig& cfg, const Vec64& s);

// dLoss/ds given dLoss/dWeights. HardTop1 uses the straight-through
// convention: backward of simple_softmax at the same tau. UniformPooling
// returns the zero vector.
Vec64 strategy_vjp(const StrategyConfig& cfg, const Vec64& s, const Vec64& upstream);

// --- FLOP accounting ---------------------------------------------------------

// Closed-form operation count of strategy_weights at score length n, under
// the convention: every scalar add/sub, multiply, divide, exp, and
// comparison (including |x| and the comparisons inside max/sort) counts 1;
// sorting is charged ceil(n*log2(n)) comparisons. Pure function of
// (kind, n, iters, k, mode).
FlopCount flop_count(const StrategyConfig& cfg, std::size_t n);

// --- names -------------------------------------------------------------------

const char* strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);
const std::vector<StrategyKind>& all_strategies();

}  // namespace softrank
