#include "softrank/soft_rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "softrank/core_ops.hpp"

namespace softrank {
namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Indices of s sorted by value descending; stable, so ties keep the lower
// original index first.
std::vector<std::size_t> argsort_desc(const Vec64& s) {
  std::vector<std::size_t> order(s.len());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  return order;
}

std::size_t argmax_index(const Vec64& s) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.len(); ++i) {
    if (s[i] > s[best]) best = i;  // strict: ties keep the lowest index
  }
  return best;
}

// Stabilized softmax of already-temperature-scaled logits.
Vec64 softmax_plain(const Vec64& c) {
  const std::size_t n = c.len();
  double m = c[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, c[i]);
  Vec64 w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::exp(c[i] - m);
    total += w[i];
  }
  for (std::size_t i = 0; i < n; ++i) w[i] /= total;
  return w;
}

// Backward of softmax_plain given its output w: dc_j = w_j (u_j - u.w).
Vec64 softmax_plain_vjp(const Vec64& w, const Vec64& upstream) {
  const std::size_t n = w.len();
  double uw = 0.0;
  for (std::size_t i = 0; i < n; ++i) uw += upstream[i] * w[i];
  Vec64 dc(n);
  for (std::size_t i = 0; i < n; ++i) dc[i] = w[i] * (upstream[i] - uw);
  return dc;
}

// Cost matrix row r: c_j = -|d_r - s_j| / tau with d_r = s[order[r]].
Vec64 cost_row(const Vec64& s, double d_r, double tau) {
  Vec64 c(s.len());
  for (std::size_t j = 0; j < s.len(); ++j) c[j] = -std::fabs(d_r - s[j]) / tau;
  return c;
}

// Routes dcost for row r into ds. cost_rj = -|d_r - s_j|/tau, so the direct
// dependence gives dcost/ds_j = sign(d_r - s_j)/tau and the sorted pivot
// d_r = s[order_r] receives the opposite sign. At j = order_r the argument
// of |.| is exactly 0 and sign(0) = 0 matches the two perturbations
// cancelling in the forward difference.
void route_cost_row_grad(const Vec64& s, double d_r, std::size_t pivot, double tau,
                         const Vec64& dcost, Vec64& ds) {
  for (std::size_t j = 0; j < s.len(); ++j) {
    const double sg = sign(d_r - s[j]) / tau;
    ds[j] += dcost[j] * sg;
    ds[pivot] -= dcost[j] * sg;
  }
}

struct SinkhornPass {
  Mat64 after;    // matrix after this normalization
  Vec64 divisor;  // the row or column sums divided out
  bool row;       // row pass vs column pass
};

Mat64 sinkhorn_forward(const Vec64& s, double tau, std::size_t iters,
                       const std::vector<std::size_t>& order,
                       std::vector<SinkhornPass>* tape, Mat64* kernel_out) {
  const std::size_t n = s.len();
  Mat64 m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const double d_r = s[order[r]];
    for (std::size_t j = 0; j < n; ++j) {
      m.at(r, j) = std::exp(-std::fabs(d_r - s[j]) / tau);
    }
  }
  if (kernel_out != nullptr) *kernel_out = m;

  auto row_pass = [&](Mat64& cur) {
    Vec64 sums(n);
    for (std::size_t r = 0; r < n; ++r) {
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) total += cur.at(r, j);
      sums[r] = total;
      for (std::size_t j = 0; j < n; ++j) cur.at(r, j) /= total;
    }
    if (tape != nullptr) tape->push_back({cur, sums, true});
  };
  auto col_pass = [&](Mat64& cur) {
    Vec64 sums(n);
    for (std::size_t j = 0; j < n; ++j) {
      double total = 0.0;
      for (std::size_t r = 0; r < n; ++r) total += cur.at(r, j);
      sums[j] = total;
      for (std::size_t r = 0; r < n; ++r) cur.at(r, j) /= total;
    }
    if (tape != nullptr) tape->push_back({cur, sums, false});
  };

  for (std::size_t it = 0; it < iters; ++it) {
    row_pass(m);
    col_pass(m);
  }
  row_pass(m);  // end on a row normalization: rows sum to 1
  return m;
}

// Unrolled backward through the normalization sequence: dm arrives as the
// gradient w.r.t. the final matrix and leaves as the gradient w.r.t. the
// initial kernel.
void sinkhorn_backward(const std::vector<SinkhornPass>& tape, Mat64& dm) {
  const std::size_t n = dm.rows();
  for (auto it = tape.rbegin(); it != tape.rend(); ++it) {
    const Mat64& after = it->after;
    const Vec64& div = it->divisor;
    if (it->row) {
      for (std::size_t r = 0; r < n; ++r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += dm.at(r, j) * after.at(r, j);
        for (std::size_t j = 0; j < n; ++j) dm.at(r, j) = (dm.at(r, j) - acc) / div[r];
      }
    } else {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) acc += dm.at(r, j) * after.at(r, j);
        for (std::size_t r = 0; r < n; ++r) dm.at(r, j) = (dm.at(r, j) - acc) / div[j];
      }
    }
  }
}

// Backward of the RankDecay extraction: given upstream over w, produce the
// gradient over the matrix. q_j = sum_r decay^r p[r][j], w = q / sum(q).
Mat64 rank_decay_extract_vjp(const Mat64& p, double decay, const Vec64& upstream) {
  const std::size_t n = p.rows();
  Vec64 q(n, 0.0);
  double decay_pow = 1.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < n; ++j) q[j] += decay_pow * p.at(r, j);
    decay_pow *= decay;
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) total += q[j];
  double uw = 0.0;
  for (std::size_t j = 0; j < n; ++j) uw += upstream[j] * q[j] / total;
  Vec64 dq(n);
  for (std::size_t j = 0; j < n; ++j) dq[j] = (upstream[j] - uw) / total;
  Mat64 dp(n, n);
  decay_pow = 1.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < n; ++j) dp.at(r, j) = decay_pow * dq[j];
    decay_pow *= decay;
  }
  return dp;
}

std::uint64_t sort_comparisons(std::size_t n) {
  if (n < 2) return 0;
  return static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(n) * std::log2(static_cast<double>(n))));
}

}  // namespace

void StrategyConfig::validate(std::size_t n) const {
  if (n == 0) throw ParameterError("StrategyConfig: score length must be >= 1");
  if (tau <= 0.0) throw ParameterError(detail::msg("StrategyConfig: tau must be > 0, got ", tau));
  if (kind == StrategyKind::TopKSoft && (top_k < 1 || top_k > n)) {
    throw ParameterError(detail::msg("StrategyConfig: top_k ", top_k, " out of range [1, ", n, "]"));
  }
  if (kind == StrategyKind::SinkhornSort && sinkhorn_iters < 1) {
    throw ParameterError("StrategyConfig: sinkhorn_iters must be >= 1");
  }
  if (weight_mode == WeightMode::RankDecay && (rank_decay <= 0.0 || rank_decay > 1.0)) {
    throw ParameterError(detail::msg("StrategyConfig: rank_decay must be in (0,1], got ", rank_decay));
  }
}

Mat64 soft_sort(const Vec64& s, double tau) {
  if (tau <= 0.0) throw ParameterError(detail::msg("soft_sort: tau must be > 0, got ", tau));
  const std::size_t n = s.len();
  const auto order = argsort_desc(s);
  Mat64 p(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const Vec64 row = softmax_plain(cost_row(s, s[order[r]], tau));
    for (std::size_t j = 0; j < n; ++j) p.at(r, j) = row[j];
  }
  return p;
}

Mat64 sinkhorn_sort(const Vec64& s, double tau, std::size_t iters) {
  if (tau <= 0.0) throw ParameterError(detail::msg("sinkhorn_sort: tau must be > 0, got ", tau));
  if (iters < 1) throw ParameterError("sinkhorn_sort: iters must be >= 1");
  return sinkhorn_forward(s, tau, iters, argsort_desc(s), nullptr, nullptr);
}

Vec64 topk_soft(const Vec64& s, double tau, std::size_t k) {
  const std::size_t n = s.len();
  if (tau <= 0.0) throw ParameterError(detail::msg("topk_soft: tau must be > 0, got ", tau));
  if (k < 1 || k > n) {
    throw ParameterError(detail::msg("topk_soft: k ", k, " out of range [1, ", n, "]"));
  }
  Vec64 full = softmax_temp(s, tau);
  if (k == n) return full;  // exact reduction to simple_softmax
  const auto order = argsort_desc(s);
  // The global max is always selected, so restricting + renormalizing the
  // max-subtracted softmax equals the softmax over the selected subset.
  double subset_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) subset_sum += full[order[i]];
  Vec64 w(n, 0.0);
  for (std::size_t i = 0; i < k; ++i) w[order[i]] = full[order[i]] / subset_sum;
  return w;
}

Vec64 simple_softmax(const Vec64& s, double tau) { return softmax_temp(s, tau); }

Vec64 hard_top1(const Vec64& s) {
  Vec64 w(s.len(), 0.0);
  w[argmax_index(s)] = 1.0;
  return w;
}

Vec64 uniform_weights(std::size_t n) {
  if (n == 0) throw ParameterError("uniform_weights: n must be >= 1");
  return Vec64(n, 1.0 / static_cast<double>(n));
}

Vec64 weights_from_relaxed_perm(const Mat64& p, WeightMode mode, double rank_decay) {
  const std::size_t n = p.rows();
  if (p.cols() != n) throw ShapeError("weights_from_relaxed_perm: matrix must be square");
  if (mode == WeightMode::TopRow) {
    Vec64 w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = p.at(0, j);
    return w;
  }
  if (rank_decay <= 0.0 || rank_decay > 1.0) {
    throw ParameterError(detail::msg("weights_from_relaxed_perm: rank_decay must be in (0,1], got ",
                                     rank_decay));
  }
  Vec64 q(n, 0.0);
  double decay_pow = 1.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < n; ++j) q[j] += decay_pow * p.at(r, j);
    decay_pow *= rank_decay;
  }
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) total += q[j];
  for (std::size_t j = 0; j < n; ++j) q[j] /= total;
  return q;
}

Vec64 strategy_weights(const StrategyConfig& cfg, const Vec64& s) {
  const std::size_t n = s.len();
  cfg.validate(n);
  switch (cfg.kind) {
    case StrategyKind::SoftSort: {
      if (cfg.weight_mode == WeightMode::TopRow) {
        // Only row 0 of the relaxed permutation survives the extraction, so
        // only row 0 is computed (this is what flop_count charges).
        const double d0 = s[argmax_index(s)];
        return softmax_plain(cost_row(s, d0, cfg.tau));
      }
      return weights_from_relaxed_perm(soft_sort(s, cfg.tau), cfg.weight_mode, cfg.rank_decay);
    }
    case StrategyKind::SinkhornSort:
      return weights_from_relaxed_perm(sinkhorn_sort(s, cfg.tau, cfg.sinkhorn_iters),
                                       cfg.weight_mode, cfg.rank_decay);
    case StrategyKind::TopKSoft:
      return topk_soft(s, cfg.tau, cfg.top_k);
    case StrategyKind::SimpleSoftmax:
      return simple_softmax(s, cfg.tau);
    case StrategyKind::HardTop1:
      return hard_top1(s);
    case StrategyKind::UniformPooling:
      return uniform_weights(n);
  }
  throw ParameterError("strategy_weights: unknown strategy kind");
}

Vec64 strategy_vjp(const StrategyConfig& cfg, const Vec64& s, const Vec64& upstream) {
  const std::size_t n = s.len();
  cfg.validate(n);
  if (upstream.len() != n) {
    throw ShapeError(detail::msg("strategy_vjp: upstream length ", upstream.len(), " != ", n));
  }
  switch (cfg.kind) {
    case StrategyKind::UniformPooling:
      return Vec64(n, 0.0);

    case StrategyKind::HardTop1: {
      // Straight-through: backward of simple_softmax at the same tau.
      const Vec64 w = simple_softmax(s, cfg.tau);
      return softmax_temp_vjp(w, cfg.tau, upstream);
    }

    case StrategyKind::SimpleSoftmax: {
      const Vec64 w = simple_softmax(s, cfg.tau);
      return softmax_temp_vjp(w, cfg.tau, upstream);
    }

    case StrategyKind::TopKSoft: {
      if (cfg.top_k == n) {
        const Vec64 w = simple_softmax(s, cfg.tau);
        return softmax_temp_vjp(w, cfg.tau, upstream);
      }
      // Softmax restricted to the selected subset; unselected scores hold a
      // locally-zero gradient (the selection is locally constant).
      const Vec64 w = topk_soft(s, cfg.tau, cfg.top_k);
      double uw = 0.0;
      for (std::size_t j = 0; j < n; ++j) uw += upstream[j] * w[j];
      Vec64 ds(n, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (w[j] > 0.0) ds[j] = w[j] * (upstream[j] - uw) / cfg.tau;
      }
      return ds;
    }

    case StrategyKind::SoftSort: {
      const auto order = argsort_desc(s);
      Vec64 ds(n, 0.0);
      if (cfg.weight_mode == WeightMode::TopRow) {
        const double d0 = s[order[0]];
        const Vec64 w = softmax_plain(cost_row(s, d0, cfg.tau));
        const Vec64 dc = softmax_plain_vjp(w, upstream);
        route_cost_row_grad(s, d0, order[0], cfg.tau, dc, ds);
        return ds;
      }
      const Mat64 p = soft_sort(s, cfg.tau);
      const Mat64 dp = rank_decay_extract_vjp(p, cfg.rank_decay, upstream);
      for (std::size_t r = 0; r < n; ++r) {
        Vec64 prow(n), dprow(n);
        for (std::size_t j = 0; j < n; ++j) {
          prow[j] = p.at(r, j);
          dprow[j] = dp.at(r, j);
        }
        const Vec64 dc = softmax_plain_vjp(prow, dprow);
        route_cost_row_grad(s, s[order[r]], order[r], cfg.tau, dc, ds);
      }
      return ds;
    }

    case StrategyKind::SinkhornSort: {
      const auto order = argsort_desc(s);
      std::vector<SinkhornPass> tape;
      Mat64 kernel;
      const Mat64 p = sinkhorn_forward(s, cfg.tau, cfg.sinkhorn_iters, order, &tape, &kernel);
      Mat64 dm(n, n, 0.0);
      if (cfg.weight_mode == WeightMode::TopRow) {
        for (std::size_t j = 0; j < n; ++j) dm.at(0, j) = upstream[j];
      } else {
        dm = rank_decay_extract_vjp(p, cfg.rank_decay, upstream);
      }
      sinkhorn_backward(tape, dm);
      // dm now holds the gradient w.r.t. the initial kernel K = exp(cost).
      Vec64 ds(n, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        Vec64 dcost(n);
        for (std::size_t j = 0; j < n; ++j) dcost[j] = dm.at(r, j) * kernel.at(r, j);
        route_cost_row_grad(s, s[order[r]], order[r], cfg.tau, dcost, ds);
      }
      return ds;
    }
  }
  throw ParameterError("strategy_vjp: unknown strategy kind");
}

FlopCount flop_count(const StrategyConfig& cfg, std::size_t n) {
  if (n == 0) throw ParameterError("flop_count: n must be >= 1");
  const auto N = static_cast<std::uint64_t>(n);
  FlopCount f;
  switch (cfg.kind) {
    case StrategyKind::UniformPooling:
      f.divisions = 1;  // 1/n computed once, broadcast free
      return f;

    case StrategyKind::HardTop1:
      f.comparisons = N - 1;  // argmax scan
      return f;

    case StrategyKind::SimpleSoftmax:
      // s/tau (n div), max (n-1 cmp), subtract max (n add), exp (n),
      // sum (n-1 add), normalize (n div).
      f.additions = 2 * N - 1;
      f.comparisons = N - 1;
      f.divisions = 2 * N;
      f.exponentials = N;
      return f;

    case StrategyKind::SoftSort: {
      if (cfg.weight_mode == WeightMode::TopRow) {
        // argmax (n-1 cmp); row-0 cost: subtract (n add), |.| (n cmp),
        // /tau (n div); stabilized softmax: max (n-1 cmp), subtract (n add),
        // exp (n), sum (n-1 add), normalize (n div).
        f.additions = 3 * N - 1;
        f.comparisons = 3 * N - 2;
        f.divisions = 2 * N;
        f.exponentials = N;
        return f;
      }
      // Full matrix: sort, n cost rows + row softmaxes, then the decayed
      // row mixture and its renormalization.
      f.comparisons = sort_comparisons(n) + N * (2 * N - 1);
      f.additions = N * (3 * N - 1) + N * (N - 1) + (N - 1);
      f.divisions = 2 * N * N + N;
      f.exponentials = N * N;
      f.multiplications = N * N + (N - 1);
      return f;
    }

    case StrategyKind::TopKSoft: {
      const auto K = static_cast<std::uint64_t>(cfg.top_k);
      // Full softmax, then a sort-based selection and subset renormalization
      // (skipped entirely when k = n, where the op reduces to the softmax).
      f.additions = 2 * N - 1;
      f.comparisons = N - 1;
      f.divisions = 2 * N;
      f.exponentials = N;
      if (K < N) {
        f.comparisons += sort_comparisons(n);
        f.additions += K - 1;
        f.divisions += K;
      }
      return f;
    }

    case StrategyKind::SinkhornSort: {
      const auto I = static_cast<std::uint64_t>(cfg.sinkhorn_iters);
      // Kernel build: sort + n^2 each of subtract, |.|, /tau, exp. Then
      // 2*iters+1 normalization passes, each n*(n-1) adds and n^2 divides.
      const std::uint64_t passes = 2 * I + 1;
      f.comparisons = sort_comparisons(n) + N * N;
      f.additions = N * N + passes * N * (N - 1);
      f.divisions = N * N + passes * N * N;
      f.exponentials = N * N;
      if (cfg.weight_mode == WeightMode::RankDecay) {
        f.multiplications += N * N + (N - 1);
        f.additions += N * (N - 1) + (N - 1);
        f.divisions += N;
      }
      return f;
    }
  }
  throw ParameterError("flop_count: unknown strategy kind");
}

const char* strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::SoftSort: return "softsort";
    case StrategyKind::SinkhornSort: return "sinkhornsort";
    case StrategyKind::TopKSoft: return "topksoft";
    case StrategyKind::SimpleSoftmax: return "simplesoftmax";
    case StrategyKind::HardTop1: return "hardtop1";
    case StrategyKind::UniformPooling: return "uniformpooling";
  }
  return "unknown";
}

StrategyKind strategy_from_name(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (StrategyKind k : all_strategies()) {
    if (lower == strategy_name(k)) return k;
  }
  throw ParameterError(detail::msg(
      "unknown strategy '", name,
      "' (expected one of: softsort, sinkhornsort, topksoft, simplesoftmax, hardtop1, "
      "uniformpooling)"));
}

const std::vector<StrategyKind>& all_strategies() {
  static const std::vector<StrategyKind> kinds = {
      StrategyKind::SoftSort,      StrategyKind::SinkhornSort,  StrategyKind::TopKSoft,
      StrategyKind::SimpleSoftmax, StrategyKind::HardTop1,      StrategyKind::UniformPooling,
  };
  return kinds;
}

}  // namespace softrank
