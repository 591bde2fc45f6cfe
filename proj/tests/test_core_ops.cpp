#include <cmath>
#include <functional>
#include <vector>

#include <doctest.h>

#include "softrank/core_ops.hpp"
#include "softrank/errors.hpp"
#include "softrank/gradcheck.hpp"
#include "softrank/rng.hpp"

using namespace softrank;

namespace {

Vec64 random_vec(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vec64 v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.uniform_in(lo, hi);
  return v;
}

// Straight-line re-implementation of the refine block, kept deliberately
// independent of the library code (separate formulas, no shared helpers).
Vec64 refine_oracle(const Vec64& x, const AffineBlockParams& p) {
  const std::size_t d_out = p.weight.rows();
  std::vector<double> y(d_out);
  for (std::size_t r = 0; r < d_out; ++r) {
    double acc = p.bias[r];
    for (std::size_t c = 0; c < p.weight.cols(); ++c) acc += p.weight.at(r, c) * x[c];
    y[r] = acc;
  }
  double mu = 0.0;
  for (double v : y) mu += v;
  mu /= static_cast<double>(d_out);
  double var = 0.0;
  for (double v : y) var += (v - mu) * (v - mu);
  var /= static_cast<double>(d_out);
  if (var < 1e-6) var = 1e-6;
  const double sigma = std::sqrt(var);
  Vec64 out(d_out);
  for (std::size_t r = 0; r < d_out; ++r) {
    const double u = p.norm_gain[r] * ((y[r] - mu) / sigma) + p.norm_bias[r];
    out[r] = u > 0.0 ? u : 0.0;
  }
  return out;
}

AffineBlockParams random_refine(Rng& rng, std::size_t d) {
  AffineBlockParams p{Mat64(d, d), Vec64(d), Vec64(d), Vec64(d)};
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) p.weight.at(r, c) = rng.uniform_in(-1.0, 1.0);
  for (std::size_t r = 0; r < d; ++r) {
    p.bias[r] = rng.uniform_in(-0.5, 0.5);
    p.norm_gain[r] = rng.uniform_in(0.5, 1.5);
    p.norm_bias[r] = rng.uniform_in(-0.5, 0.5);
  }
  return p;
}

}  // namespace

TEST_CASE("cosine similarity worked values") {
  CHECK(cosine_similarity({3, 4}, {3, 4}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cosine_similarity({1, 0}, {0, 1}) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(cosine_similarity({1, 1}, {1, 0}) ==
        doctest::Approx(0.7071067811865475).epsilon(1e-14));
}

TEST_CASE("cosine similarity rejects zero-norm inputs") {
  CHECK_THROWS_AS(cosine_similarity({0, 0}, {1, 0}), ZeroNormError);
  CHECK_THROWS_AS(cosine_similarity({1, 0}, {0, 0}), ZeroNormError);
}

TEST_CASE("cosine similarity is scale-invariant and bounded") {
  Rng rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const Vec64 a = random_vec(rng, 5);
    const Vec64 b = random_vec(rng, 5);
    const double alpha = rng.uniform_in(0.01, 10.0);
    const double beta = rng.uniform_in(0.01, 10.0);
    Vec64 as(5), bs(5);
    for (std::size_t i = 0; i < 5; ++i) {
      as[i] = alpha * a[i];
      bs[i] = beta * b[i];
    }
    const double c0 = cosine_similarity(a, b);
    const double c1 = cosine_similarity(as, bs);
    CHECK(std::fabs(c0 - c1) < 1e-12);
    CHECK(c0 <= 1.0);
    CHECK(c0 >= -1.0);
  }
}

TEST_CASE("softmax_temp worked values") {
  const Vec64 sym = softmax_temp({1, 1, 1}, 1.0);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(sym[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const Vec64 logistic = softmax_temp({1, 0}, 1.0);
  CHECK(logistic[0] == doctest::Approx(0.7310585786).epsilon(1e-9));
  CHECK(logistic[1] == doctest::Approx(0.2689414214).epsilon(1e-9));

  const Vec64 hard = softmax_temp({10, 0}, 0.01);
  CHECK(std::fabs(hard[0] - 1.0) < 1e-9);
  CHECK(std::fabs(hard[1] - 0.0) < 1e-9);

  CHECK_THROWS_AS(softmax_temp({1, 0}, 0.0), ParameterError);
  CHECK_THROWS_AS(softmax_temp({1, 0}, -1.0), ParameterError);
}

TEST_CASE("softmax_temp is a simplex map and order-preserving") {
  Rng rng(22);
  for (int rep = 0; rep < 50; ++rep) {
    const Vec64 s = random_vec(rng, 6, -3.0, 3.0);
    const double tau = rng.uniform_in(0.05, 3.0);
    const Vec64 w = softmax_temp(s, tau);
    double sum = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(w[i] > 0.0);
      CHECK(w[i] < 1.0);
      sum += w[i];
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        if (s[i] > s[j]) CHECK(w[i] > w[j]);
  }
}

TEST_CASE("linear_project worked values") {
  const Mat64 id = Mat64::from(2, 2, {1, 0, 0, 1});
  const Vec64 x{2.5, -1.5};
  const Vec64 zero{0, 0};
  const Vec64 out_id = linear_project(x, id, zero);
  CHECK(out_id[0] == 2.5);
  CHECK(out_id[1] == -1.5);

  const Mat64 zeros = Mat64::from(2, 2, {0, 0, 0, 0});
  const Vec64 c{3.0, 4.0};
  const Vec64 out_c = linear_project(x, zeros, c);
  CHECK(out_c[0] == 3.0);
  CHECK(out_c[1] == 4.0);

  const Mat64 w = Mat64::from(2, 2, {1, 2, 3, 4});
  const Vec64 ones{1, 1};
  const Vec64 out = linear_project(ones, w, zero);
  CHECK(out[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(7.0).epsilon(1e-15));

  CHECK_THROWS_AS(linear_project({1, 2, 3}, w, zero), ShapeError);
}

TEST_CASE("linear_project is linear") {
  Rng rng(23);
  const std::size_t d_in = 5, d_out = 3;
  Mat64 w(d_out, d_in);
  for (std::size_t r = 0; r < d_out; ++r)
    for (std::size_t c = 0; c < d_in; ++c) w.at(r, c) = rng.uniform_in(-1.0, 1.0);
  const Vec64 b = random_vec(rng, d_out);
  for (int rep = 0; rep < 20; ++rep) {
    const Vec64 x = random_vec(rng, d_in);
    const Vec64 y = random_vec(rng, d_in);
    Vec64 xy(d_in);
    for (std::size_t i = 0; i < d_in; ++i) xy[i] = x[i] + y[i];
    const Vec64 fx = linear_project(x, w, b);
    const Vec64 fy = linear_project(y, w, b);
    const Vec64 fxy = linear_project(xy, w, b);
    for (std::size_t r = 0; r < d_out; ++r)
      CHECK(std::fabs(fxy[r] - (fx[r] + fy[r] - b[r])) < 1e-10);
  }
}

TEST_CASE("affine_refine trivial cases") {
  const std::size_t d = 4;
  AffineBlockParams p{Mat64(d, d), Vec64(d), Vec64(d, 1.0), Vec64(d)};
  // zero weight, zero bias, zero norm_bias -> ReLU(0) = 0 (variance floor path)
  const Vec64 out = affine_refine(Vec64(d, 0.5), p);
  for (std::size_t i = 0; i < d; ++i) CHECK(out[i] == 0.0);

  // identity weight, zero bias, gain 1, norm_bias 0, x standardized -> ReLU(x)
  AffineBlockParams q{Mat64(d, d), Vec64(d), Vec64(d, 1.0), Vec64(d)};
  for (std::size_t i = 0; i < d; ++i) q.weight.at(i, i) = 1.0;
  const Vec64 x{1.0, -1.0, 1.0, -1.0};  // mean 0, population variance 1
  const Vec64 rx = affine_refine(x, q);
  for (std::size_t i = 0; i < d; ++i) CHECK(rx[i] == doctest::Approx(std::max(0.0, x[i])).epsilon(1e-12));
}

TEST_CASE("affine_refine matches the straight-line oracle") {
  Rng rng(24);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t d = 3 + static_cast<std::size_t>(rng.below(6));
    const AffineBlockParams p = random_refine(rng, d);
    const Vec64 x = random_vec(rng, d);
    const Vec64 got = affine_refine(x, p);
    const Vec64 want = refine_oracle(x, p);
    for (std::size_t i = 0; i < d; ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("finite_diff_check accepts a correct quadratic gradient") {
  auto f = [](const Vec64& x) {
    double t = 0.0;
    for (std::size_t i = 0; i < x.len(); ++i) t += x[i] * x[i];
    return t;
  };
  auto grad = [](const Vec64& x) {
    Vec64 g(x.len());
    for (std::size_t i = 0; i < x.len(); ++i) g[i] = 2.0 * x[i];
    return g;
  };
  const GradCheckReport rep = finite_diff_check(f, grad, {1.0, 2.0}, 1e-5, 1e-4);
  CHECK(rep.passed);
  CHECK(rep.max_rel_error < 1e-7);
}

TEST_CASE("finite_diff_check rejects a doubled gradient (negative control)") {
  auto f = [](const Vec64& x) {
    double t = 0.0;
    for (std::size_t i = 0; i < x.len(); ++i) t += x[i] * x[i];
    return t;
  };
  auto bad = [](const Vec64& x) {
    Vec64 g(x.len());
    for (std::size_t i = 0; i < x.len(); ++i) g[i] = 4.0 * x[i];  // x2 too big
    return g;
  };
  const GradCheckReport rep = finite_diff_check(f, bad, {1.0, 2.0}, 1e-5, 1e-4);
  CHECK_FALSE(rep.passed);
}

TEST_CASE("finite_diff_check validates softmax component gradient") {
  Rng rng(25);
  const Vec64 point = random_vec(rng, 5, -2.0, 2.0);
  const double tau = 0.7;
  auto f = [tau](const Vec64& s) { return softmax_temp(s, tau)[0]; };
  auto grad = [tau](const Vec64& s) {
    const Vec64 w = softmax_temp(s, tau);
    Vec64 up(s.len(), 0.0);
    up[0] = 1.0;
    return softmax_temp_vjp(w, tau, up);
  };
  const GradCheckReport rep = finite_diff_check(f, grad, point, 1e-5, 1e-5);
  CHECK(rep.passed);
}

TEST_CASE("core op vjps pass finite differences") {
  Rng rng(26);
  const double h = 1e-5, tol = 1e-4;

  SUBCASE("cosine") {
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t d = 4;
      const Vec64 a = random_vec(rng, d, 0.2, 1.0);
      const Vec64 b = random_vec(rng, d, 0.2, 1.0);
      const double up = rng.uniform_in(-1.0, 1.0);
      // check d/da with b fixed
      auto f = [&b, up](const Vec64& x) { return up * cosine_similarity(x, b); };
      auto grad = [&b, up](const Vec64& x) {
        Vec64 da(x.len(), 0.0), db(b.len(), 0.0);
        cosine_similarity_vjp(x, b, up, da, db);
        return da;
      };
      CHECK(finite_diff_check(f, grad, a, h, tol).passed);
    }
  }

  SUBCASE("affine refine parameters and input") {
    for (int rep = 0; rep < 10; ++rep) {
      const std::size_t d = 5;
      const AffineBlockParams p = random_refine(rng, d);
      Vec64 x = random_vec(rng, d);
      const Vec64 up = random_vec(rng, d);
      // keep the probe away from ReLU kinks
      AffineRefineCache cache;
      affine_refine_fwd(x, p, cache);
      bool kink = false;
      for (std::size_t i = 0; i < d; ++i)
        if (std::fabs(cache.u[i]) < 1e-3) kink = true;
      if (kink) continue;

      auto f = [&p, &up](const Vec64& xx) {
        const Vec64 out = affine_refine(xx, p);
        double t = 0.0;
        for (std::size_t i = 0; i < out.len(); ++i) t += up[i] * out[i];
        return t;
      };
      auto grad = [&p, &up](const Vec64& xx) {
        AffineRefineCache c2;
        affine_refine_fwd(xx, p, c2);
        AffineBlockGrads g = AffineBlockGrads::zeros_like(p);
        Vec64 dx(xx.len(), 0.0);
        affine_refine_vjp(xx, p, c2, up, g, dx);
        return dx;
      };
      CHECK(finite_diff_check(f, grad, x, h, tol).passed);
    }
  }
}
