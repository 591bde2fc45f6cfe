#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <doctest.h>

#include "softrank/core_ops.hpp"
#include "softrank/errors.hpp"
#include "softrank/gradcheck.hpp"
#include "softrank/rng.hpp"
#include "softrank/soft_rank.hpp"

using namespace softrank;

namespace {

Vec64 distinct_scores(Rng& rng, std::size_t n, double min_gap = 1e-3) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec64 s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = rng.uniform_in(-1.0, 1.0);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::fabs(s[i] - s[j]) < min_gap) {
          ok = false;
          break;
        }
    if (ok) return s;
  }
  throw EvalError("distinct_scores: could not draw a separated vector");
}

std::size_t argmax_lowest(const Vec64& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.len(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

void check_simplex(const Vec64& w, double tol = 1e-9) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.len(); ++i) {
    CHECK(w[i] >= 0.0);
    sum += w[i];
  }
  CHECK(std::fabs(sum - 1.0) < tol);
}

constexpr double kLogistic = 0.7310585786300049;  // 1 / (1 + e^-1)

}  // namespace

TEST_CASE("soft_sort 2x2 closed form") {
  const Mat64 p = soft_sort({2, 1}, 1.0);
  CHECK(p.at(0, 0) == doctest::Approx(0.7310586).epsilon(1e-6));
  CHECK(p.at(0, 1) == doctest::Approx(0.2689414).epsilon(1e-6));
  CHECK(p.at(1, 0) == doctest::Approx(0.2689414).epsilon(1e-6));
  CHECK(p.at(1, 1) == doctest::Approx(0.7310586).epsilon(1e-6));
  CHECK_THROWS_AS(soft_sort({2, 1}, 0.0), ParameterError);
}

TEST_CASE("soft_sort constant scores give uniform rows") {
  for (double c : {0.0, -0.4, 2.5}) {
    const Mat64 p = soft_sort({c, c, c, c}, 0.7);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(p.at(r, j) == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("soft_sort hardens to the exact permutation") {
  // ranks descending: view 0 (0.9) at rank 0, view 2 (0.5) at rank 1,
  // view 1 (0.1) at rank 2
  const Mat64 p = soft_sort({0.9, 0.1, 0.5}, 1e-4);
  const double want[3][3] = {{1, 0, 0}, {0, 0, 1}, {0, 1, 0}};
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::fabs(p.at(r, j) - want[r][j]) < 1e-6);
}

TEST_CASE("soft_sort rows are probability distributions") {
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(7));
    const Vec64 s = distinct_scores(rng, n);
    const double tau = rng.uniform_in(0.05, 2.0);
    const Mat64 p = soft_sort(s, tau);
    for (std::size_t r = 0; r < n; ++r) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(p.at(r, j) >= 0.0);
        sum += p.at(r, j);
      }
      CHECK(std::fabs(sum - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("soft_sort is permutation-equivariant in its columns") {
  Rng rng(32);
  const std::size_t n = 5;
  const Vec64 s = distinct_scores(rng, n);
  const double tau = 0.6;
  const Mat64 p = soft_sort(s, tau);

  // cyclic shift permutation pi(j) = (j+2) mod n applied to the scores
  std::vector<std::size_t> pi(n);
  for (std::size_t j = 0; j < n; ++j) pi[j] = (j + 2) % n;
  Vec64 sp(n);
  for (std::size_t j = 0; j < n; ++j) sp[j] = s[pi[j]];
  const Mat64 pp = soft_sort(sp, tau);

  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < n; ++j)
      CHECK(pp.at(r, j) == doctest::Approx(p.at(r, pi[j])).epsilon(1e-12));
}

TEST_CASE("sinkhorn_sort 2x2 symmetric fixed point") {
  const Mat64 p = sinkhorn_sort({2, 1}, 1.0, 50);
  CHECK(p.at(0, 0) == doctest::Approx(0.7310586).epsilon(1e-6));
  CHECK(p.at(0, 1) == doctest::Approx(0.2689414).epsilon(1e-6));
  CHECK(p.at(1, 0) == doctest::Approx(0.2689414).epsilon(1e-6));
  CHECK(p.at(1, 1) == doctest::Approx(0.7310586).epsilon(1e-6));
  CHECK_THROWS_AS(sinkhorn_sort({2, 1}, -1.0, 50), ParameterError);
  CHECK_THROWS_AS(sinkhorn_sort({2, 1}, 1.0, 0), ParameterError);
}

TEST_CASE("sinkhorn_sort converges to double stochasticity at tau=1") {
  Rng rng(33);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(7));
    const Vec64 s = distinct_scores(rng, n);
    const Mat64 p = sinkhorn_sort(s, 1.0, 50);
    for (std::size_t r = 0; r < n; ++r) {
      double rs = 0.0;
      for (std::size_t j = 0; j < n; ++j) rs += p.at(r, j);
      CHECK(std::fabs(rs - 1.0) < 1e-12);  // ends on a row pass
    }
    for (std::size_t j = 0; j < n; ++j) {
      double cs = 0.0;
      for (std::size_t r = 0; r < n; ++r) cs += p.at(r, j);
      CHECK(std::fabs(cs - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("sinkhorn_sort constant scores give the uniform matrix") {
  const Mat64 p = sinkhorn_sort({0.3, 0.3}, 0.5, 7);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(p.at(r, j) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("topk_soft worked values") {
  const Vec64 w = topk_soft({3, 2, 1}, 1.0, 2);
  CHECK(w[0] == doctest::Approx(0.7310586).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(0.2689414).epsilon(1e-6));
  CHECK(w[2] == 0.0);

  const Vec64 tie = topk_soft({5, 5, 0}, 1.0, 1);
  CHECK(tie[0] == 1.0);
  CHECK(tie[1] == 0.0);
  CHECK(tie[2] == 0.0);

  CHECK_THROWS_AS(topk_soft({1, 2}, 1.0, 0), ParameterError);
  CHECK_THROWS_AS(topk_soft({1, 2}, 1.0, 3), ParameterError);
  CHECK_THROWS_AS(topk_soft({1, 2}, 0.0, 1), ParameterError);
}

TEST_CASE("topk_soft with k = n reduces to simple_softmax") {
  Rng rng(34);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(6));
    const Vec64 s = distinct_scores(rng, n);
    const double tau = rng.uniform_in(0.1, 2.0);
    const Vec64 a = topk_soft(s, tau, n);
    const Vec64 b = simple_softmax(s, tau);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
  }
}

TEST_CASE("topk_soft equals a softmax over the selected subset") {
  Rng rng(35);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 4 + static_cast<std::size_t>(rng.below(4));
    const std::size_t k = 2 + static_cast<std::size_t>(rng.below(n - 2));
    const Vec64 s = distinct_scores(rng, n);
    const double tau = rng.uniform_in(0.2, 1.5);
    const Vec64 w = topk_soft(s, tau, k);

    // independently select the k largest by (score, lowest index)
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&s](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    idx.resize(k);
    Vec64 sub(k);
    for (std::size_t i = 0; i < k; ++i) sub[i] = s[idx[i]];
    const Vec64 subw = softmax_temp(sub, tau);

    std::size_t nonzeros = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (w[i] != 0.0) ++nonzeros;
    CHECK(nonzeros == k);
    for (std::size_t i = 0; i < k; ++i)
      CHECK(w[idx[i]] == doctest::Approx(subw[i]).epsilon(1e-12));
  }
}

TEST_CASE("topk_soft and simple_softmax are monotone in selected scores") {
  const Vec64 base{0.8, 0.1, 0.5, -0.2};
  Vec64 bumped = base;
  bumped[2] += 0.05;  // stays inside the top-3 subset
  const Vec64 w0 = topk_soft(base, 1.0, 3);
  const Vec64 w1 = topk_soft(bumped, 1.0, 3);
  CHECK(w1[2] > w0[2]);
  const Vec64 v0 = simple_softmax(base, 1.0);
  const Vec64 v1 = simple_softmax(bumped, 1.0);
  CHECK(v1[2] > v0[2]);
}

TEST_CASE("simple_softmax worked values") {
  const Vec64 sym = simple_softmax({1, 1, 1, 1}, 1.0);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(sym[i] == doctest::Approx(0.25).epsilon(1e-14));

  const Vec64 w = simple_softmax({1, 0}, 1.0);
  CHECK(w[0] == doctest::Approx(kLogistic).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(1.0 - kLogistic).epsilon(1e-12));

  const Vec64 hard = simple_softmax({1, 0}, 1e-4);
  CHECK(std::fabs(hard[0] - 1.0) < 1e-9);
  CHECK(std::fabs(hard[1]) < 1e-9);
}

TEST_CASE("hard_top1 worked values") {
  const Vec64 a = hard_top1({0.2, 0.9, 0.5});
  CHECK(a[0] == 0.0);
  CHECK(a[1] == 1.0);
  CHECK(a[2] == 0.0);

  const Vec64 tie = hard_top1({0.4, 0.4, 0.4});
  CHECK(tie[0] == 1.0);
  CHECK(tie[1] == 0.0);
  CHECK(tie[2] == 0.0);

  const Vec64 neg = hard_top1({-1.0, -0.5});
  CHECK(neg[0] == 0.0);
  CHECK(neg[1] == 1.0);
}

TEST_CASE("uniform_weights worked values") {
  const Vec64 six = uniform_weights(6);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(six[i] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  const Vec64 one = uniform_weights(1);
  CHECK(one[0] == 1.0);
  const Vec64 two = uniform_weights(2);
  CHECK(two[0] == 0.5);
  CHECK(two[1] == 0.5);
  CHECK_THROWS_AS(uniform_weights(0), ParameterError);
}

TEST_CASE("weights_from_relaxed_perm worked values") {
  // exact permutation matrix, TopRow -> one-hot at the top-ranked view
  const Mat64 perm = Mat64::from(3, 3, {0, 0, 1, 1, 0, 0, 0, 1, 0});
  const Vec64 hardw = weights_from_relaxed_perm(perm, WeightMode::TopRow, 0.5);
  CHECK(hardw[0] == 0.0);
  CHECK(hardw[1] == 0.0);
  CHECK(hardw[2] == 1.0);

  // row 0 of the 2x2 closed form
  const Mat64 p = soft_sort({2, 1}, 1.0);
  const Vec64 toprow = weights_from_relaxed_perm(p, WeightMode::TopRow, 0.5);
  CHECK(toprow[0] == doctest::Approx(0.7310586).epsilon(1e-6));
  CHECK(toprow[1] == doctest::Approx(0.2689414).epsilon(1e-6));

  // uniform matrix -> uniform weights in both modes
  const Mat64 u = Mat64::from(3, 3, std::vector<double>(9, 1.0 / 3.0));
  for (WeightMode mode : {WeightMode::TopRow, WeightMode::RankDecay}) {
    const Vec64 w = weights_from_relaxed_perm(u, mode, 0.5);
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(w[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }

  // RankDecay agrees with the direct formula on the 2x2 closed form
  const double g = 0.5;
  const double raw0 = p.at(0, 0) + g * p.at(1, 0);
  const double raw1 = p.at(0, 1) + g * p.at(1, 1);
  const Vec64 decay = weights_from_relaxed_perm(p, WeightMode::RankDecay, g);
  CHECK(decay[0] == doctest::Approx(raw0 / (raw0 + raw1)).epsilon(1e-12));
  CHECK(decay[1] == doctest::Approx(raw1 / (raw0 + raw1)).epsilon(1e-12));

  CHECK_THROWS_AS(weights_from_relaxed_perm(p, WeightMode::RankDecay, 0.0),
                  ParameterError);
  CHECK_THROWS_AS(weights_from_relaxed_perm(p, WeightMode::RankDecay, 1.5),
                  ParameterError);
}

TEST_CASE("every strategy emits simplex weights") {
  Rng rng(36);
  for (int rep = 0; rep < 15; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(7));
    const Vec64 s = distinct_scores(rng, n);
    for (StrategyKind kind : all_strategies()) {
      StrategyConfig cfg;
      cfg.kind = kind;
      cfg.tau = rng.uniform_in(0.2, 1.5);
      cfg.top_k = std::min<std::size_t>(3, n);
      cfg.sinkhorn_iters = 20;
      cfg.validate(n);
      check_simplex(strategy_weights(cfg, s));
    }
  }
}

TEST_CASE("strategy_weights matches the full relaxed-permutation path") {
  Rng rng(37);
  const Vec64 s = distinct_scores(rng, 6);
  StrategyConfig cfg;
  cfg.kind = StrategyKind::SoftSort;
  cfg.tau = 0.8;
  const Vec64 fast = strategy_weights(cfg, s);
  const Vec64 full =
      weights_from_relaxed_perm(soft_sort(s, cfg.tau), WeightMode::TopRow, cfg.rank_decay);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(fast[i] == doctest::Approx(full[i]).epsilon(1e-13));
}

TEST_CASE("tau-limit argmax agreement across strategies") {
  Rng rng(38);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(7));
    const Vec64 s = distinct_scores(rng, n, 1e-2);
    const std::size_t top = argmax_lowest(s);
    const double tau = 1e-4;

    StrategyConfig ss;
    ss.kind = StrategyKind::SoftSort;
    ss.tau = tau;
    CHECK(argmax_lowest(strategy_weights(ss, s)) == top);
    CHECK(argmax_lowest(topk_soft(s, tau, 1)) == top);
    CHECK(argmax_lowest(simple_softmax(s, tau)) == top);
    CHECK(argmax_lowest(hard_top1(s)) == top);
  }
}

TEST_CASE("strategy_vjp worked values") {
  // UniformPooling: constant forward, zero gradient
  StrategyConfig uni;
  uni.kind = StrategyKind::UniformPooling;
  const Vec64 gu = strategy_vjp(uni, {0.3, -0.2, 0.9}, {1.0, 2.0, 3.0});
  for (std::size_t i = 0; i < 3; ++i) CHECK(gu[i] == 0.0);

  // HardTop1 straight-through == SimpleSoftmax backward at the same tau
  StrategyConfig hard;
  hard.kind = StrategyKind::HardTop1;
  hard.tau = 0.7;
  StrategyConfig soft;
  soft.kind = StrategyKind::SimpleSoftmax;
  soft.tau = 0.7;
  const Vec64 s{0.5, -0.1, 0.2};
  const Vec64 up{0.4, -1.1, 0.3};
  const Vec64 gh = strategy_vjp(hard, s, up);
  const Vec64 gs = strategy_vjp(soft, s, up);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(gh[i] == doctest::Approx(gs[i]).epsilon(1e-14));
}

TEST_CASE("strategy_vjp matches finite differences (spot checks)") {
  Rng rng(39);
  const double h = 1e-5, tol = 1e-4;

  auto fd_case = [&](StrategyConfig cfg, std::size_t n) {
    const Vec64 s = distinct_scores(rng, n);
    Vec64 up(n);
    for (std::size_t i = 0; i < n; ++i) up[i] = rng.uniform_in(-1.0, 1.0);
    auto f = [&cfg, &up](const Vec64& x) {
      const Vec64 w = strategy_weights(cfg, x);
      double t = 0.0;
      for (std::size_t i = 0; i < w.len(); ++i) t += up[i] * w[i];
      return t;
    };
    auto grad = [&cfg, &up](const Vec64& x) { return strategy_vjp(cfg, x, up); };
    const GradCheckReport rep = finite_diff_check(f, grad, s, h, tol);
    CHECK(rep.passed);
  };

  SUBCASE("simple softmax at the spec point") {
    StrategyConfig cfg;
    cfg.kind = StrategyKind::SimpleSoftmax;
    cfg.tau = 1.0;
    auto f = [&cfg](const Vec64& x) { return strategy_weights(cfg, x)[0]; };
    auto grad = [&cfg](const Vec64& x) {
      return strategy_vjp(cfg, x, {1.0, 0.0});
    };
    const GradCheckReport rep = finite_diff_check(f, grad, {1.0, 0.0}, 1e-5, 1e-5);
    CHECK(rep.passed);
  }
  SUBCASE("softsort top-row") {
    for (int rep = 0; rep < 5; ++rep) {
      StrategyConfig cfg;
      cfg.kind = StrategyKind::SoftSort;
      cfg.tau = 1.0;
      fd_case(cfg, 6);
    }
  }
  SUBCASE("softsort rank-decay") {
    StrategyConfig cfg;
    cfg.kind = StrategyKind::SoftSort;
    cfg.tau = 0.8;
    cfg.weight_mode = WeightMode::RankDecay;
    cfg.rank_decay = 0.5;
    fd_case(cfg, 5);
  }
  SUBCASE("sinkhorn unrolled") {
    StrategyConfig cfg;
    cfg.kind = StrategyKind::SinkhornSort;
    cfg.tau = 1.0;
    cfg.sinkhorn_iters = 10;
    fd_case(cfg, 4);
  }
  SUBCASE("simple softmax random") {
    StrategyConfig cfg;
    cfg.kind = StrategyKind::SimpleSoftmax;
    cfg.tau = 0.6;
    fd_case(cfg, 8);
  }
}

TEST_CASE("topk_soft vjp: selected coordinates match FD, others are exactly zero") {
  Rng rng(40);
  StrategyConfig cfg;
  cfg.kind = StrategyKind::TopKSoft;
  cfg.tau = 0.9;
  cfg.top_k = 3;
  const std::size_t n = 6;
  const Vec64 s = distinct_scores(rng, n);
  Vec64 up(n);
  for (std::size_t i = 0; i < n; ++i) up[i] = rng.uniform_in(-1.0, 1.0);

  const Vec64 g = strategy_vjp(cfg, s, up);
  const Vec64 w = strategy_weights(cfg, s);

  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] != 0.0)
      selected.push_back(i);
    else
      CHECK(g[i] == 0.0);  // unselected scores carry no gradient
  }
  REQUIRE(selected.size() == cfg.top_k);

  // FD over the selected coordinates only (others frozen): perturbations of
  // unselected scores do not move the forward value, so probing them would
  // measure pure rounding noise.
  Vec64 sub(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) sub[i] = s[selected[i]];
  auto embed = [&](const Vec64& x) {
    Vec64 full = s;
    for (std::size_t i = 0; i < selected.size(); ++i) full[selected[i]] = x[i];
    return full;
  };
  auto f = [&](const Vec64& x) {
    const Vec64 ww = strategy_weights(cfg, embed(x));
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t += up[i] * ww[i];
    return t;
  };
  auto grad = [&](const Vec64& x) {
    const Vec64 gg = strategy_vjp(cfg, embed(x), up);
    Vec64 out(x.len());
    for (std::size_t i = 0; i < selected.size(); ++i) out[i] = gg[selected[i]];
    return out;
  };
  CHECK(finite_diff_check(f, grad, sub, 1e-5, 1e-4).passed);
}

TEST_CASE("flop_count exact values at n=6 defaults") {
  auto total_at = [](StrategyKind kind) {
    StrategyConfig cfg;
    cfg.kind = kind;
    return flop_count(cfg, 6).total();
  };
  CHECK(total_at(StrategyKind::UniformPooling) == 1);
  CHECK(total_at(StrategyKind::HardTop1) == 5);
  CHECK(total_at(StrategyKind::SimpleSoftmax) == 34);
  CHECK(total_at(StrategyKind::SoftSort) == 51);
  CHECK(total_at(StrategyKind::TopKSoft) == 55);
  CHECK(total_at(StrategyKind::SinkhornSort) == 6826);
}

TEST_CASE("flop_count ordering and ratio band at n=6") {
  std::vector<std::uint64_t> totals;
  for (StrategyKind kind : {StrategyKind::UniformPooling, StrategyKind::HardTop1,
                            StrategyKind::SimpleSoftmax, StrategyKind::SoftSort,
                            StrategyKind::TopKSoft, StrategyKind::SinkhornSort}) {
    StrategyConfig cfg;
    cfg.kind = kind;
    totals.push_back(flop_count(cfg, 6).total());
  }
  for (std::size_t i = 0; i + 1 < totals.size(); ++i) CHECK(totals[i] < totals[i + 1]);
  const double ratio = static_cast<double>(totals.back()) /
                       static_cast<double>(totals[3]);  // sinkhorn / softsort
  CHECK(ratio > 50.0);
}

TEST_CASE("flop_count degenerate and purity properties") {
  StrategyConfig uni;
  uni.kind = StrategyKind::UniformPooling;
  const FlopCount n1 = flop_count(uni, 1);
  CHECK(n1.total() == 1);
  CHECK(n1.divisions == 1);
  CHECK(n1.additions == 0);
  CHECK(n1.multiplications == 0);
  CHECK(n1.exponentials == 0);
  CHECK(n1.comparisons == 0);

  for (StrategyKind kind : all_strategies()) {
    StrategyConfig cfg;
    cfg.kind = kind;
    const FlopCount a = flop_count(cfg, 6);
    const FlopCount b = flop_count(cfg, 6);
    CHECK(a.additions == b.additions);
    CHECK(a.multiplications == b.multiplications);
    CHECK(a.exponentials == b.exponentials);
    CHECK(a.comparisons == b.comparisons);
    CHECK(a.divisions == b.divisions);
    CHECK(a.total() ==
          a.additions + a.multiplications + a.exponentials + a.comparisons + a.divisions);
  }
}

TEST_CASE("StrategyConfig::validate rejects bad fields") {
  StrategyConfig cfg;
  cfg.kind = StrategyKind::TopKSoft;
  cfg.top_k = 7;
  CHECK_THROWS_AS(cfg.validate(6), ParameterError);
  cfg.top_k = 3;
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.validate(6), ParameterError);
  cfg.tau = 1.0;
  cfg.kind = StrategyKind::SinkhornSort;
  cfg.sinkhorn_iters = 0;
  CHECK_THROWS_AS(cfg.validate(6), ParameterError);
  cfg.sinkhorn_iters = 50;
  cfg.kind = StrategyKind::SoftSort;
  cfg.weight_mode = WeightMode::RankDecay;
  cfg.rank_decay = 0.0;
  CHECK_THROWS_AS(cfg.validate(6), ParameterError);
  cfg.rank_decay = 0.5;
  cfg.validate(6);  // and a valid config passes
}

TEST_CASE("strategy names round-trip") {
  for (StrategyKind kind : all_strategies()) {
    CHECK(strategy_from_name(strategy_name(kind)) == kind);
  }
  CHECK_THROWS_AS(strategy_from_name("bogosort"), ParameterError);
}
