/* Copyright 2026 The cpfl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpfl/core/error.hpp"
#include "cpfl/core/model.hpp"
#include "cpfl/core/rng.hpp"
#include "cpfl/svgd/adagrad.hpp"
#include "cpfl/svgd/kernels.hpp"
#include "cpfl/svgd/reference.hpp"
#include "cpfl/svgd/svgd.hpp"
#include "cpfl/svgd/tilted.hpp"
#include "oracles.hpp"

using namespace cpfl;
using namespace cpfl::svgd;

namespace {

ParticleSet random_particles(SeededRng& rng, std::size_t n, std::size_t d, double scale = 1.0) {
  ParticleSet p(n, d);
  for (double& v : p.flat()) v = scale * rng.normal();
  return p;
}

std::vector<std::vector<double>> rows_of(const ParticleSet& p) {
  std::vector<std::vector<double>> out;
  for (std::size_t n = 0; n < p.count(); ++n) out.emplace_back(p.row(n).begin(), p.row(n).end());
  return out;
}

AgentShard random_shard(SeededRng& rng, const ModelSpec& m, std::size_t n) {
  AgentShard s;
  for (std::size_t i = 0; i < n; ++i) {
    Example ex{Vector(m.feature_dim), static_cast<std::size_t>(rng.below(m.num_classes))};
    for (double& v : ex.features) v = rng.normal();
    s.examples.push_back(ex);
  }
  return s;
}

ScoreFn gaussian_score(Vector mean, Vector var) {
  return [mean, var](std::span<const double> x) {
    Vector g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = -(x[i] - mean[i]) / var[i];
    return g;
  };
}

}  // namespace

TEST_CASE("rbf kernel closed forms") {
  const Vector x{1.0, 2.0}, y{1.0, 2.0};
  const auto same = rbf_kernel_and_grad(x, y, 3.0);
  CHECK(same.k == 1.0);
  CHECK(same.grad_x == Vector{0.0, 0.0});
  const auto unit = rbf_kernel_and_grad(Vector{1.0, 0.0}, Vector{0.0, 0.0}, 1.0);
  CHECK(unit.k == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(unit.grad_x[0] == doctest::Approx(-2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(unit.grad_x[1] == 0.0);
  CHECK_THROWS_AS(rbf_kernel_and_grad(x, y, 0.0), InvalidInput);
  CHECK_THROWS_AS(rbf_kernel_and_grad(x, Vector{1.0}, 1.0), InvalidInput);
}

TEST_CASE("median bandwidth") {
  ParticleSet two(2, 1);
  two(0, 0) = 0.0;
  two(1, 0) = 2.0;
  CHECK(median_bandwidth(two, 1e-6) == doctest::Approx(4.0 / std::numbers::ln2).epsilon(1e-14));
  CHECK(median_bandwidth(two, 1e-6) == doctest::Approx(5.7708).epsilon(1e-4));

  ParticleSet same(4, 3);
  CHECK(median_bandwidth(same, 1e-6) == 1e-6);

  // Pair distances on a line at 0, 1, 3: {1, 2, 3}, median 2.
  ParticleSet three(3, 1);
  three(1, 0) = 1.0;
  three(2, 0) = 3.0;
  CHECK(median_bandwidth(three, 1e-6) == doctest::Approx(4.0 / std::log(3.0)).epsilon(1e-14));

  KernelConfig fixed;
  fixed.svgd_bandwidth = FixedBandwidth{2.5};
  CHECK(resolve_bandwidth(three, fixed) == 2.5);
}

TEST_CASE("kde gradient closed forms") {
  ParticleSet one(1, 2);
  one(0, 0) = 1.0;
  one(0, 1) = -1.0;
  const Vector g = kde_log_density_grad(Vector{2.0, 1.0}, one, 0.5);
  CHECK(g[0] == doctest::Approx(-(2.0 / 0.5) * 1.0));
  CHECK(g[1] == doctest::Approx(-(2.0 / 0.5) * 2.0));

  ParticleSet line(2, 2);
  line(0, 0) = -1.0;
  line(1, 0) = 1.0;
  const Vector mid = kde_log_density_grad(Vector{0.0, 0.7}, line, 0.55);
  CHECK(std::abs(mid[0]) < 1e-15);

  // Far from every support point the max-shift keeps the gradient finite.
  const Vector far = kde_log_density_grad(Vector{1e3, 0.0}, line, 0.55);
  CHECK(std::isfinite(far[0]));
  CHECK(far[0] == doctest::Approx(-(2.0 / 0.55) * (1e3 - 1.0)));
}

TEST_CASE("kde density and gradient match the oracle and finite differences") {
  SeededRng rng(11);
  for (int t = 0; t < 20; ++t) {
    const ParticleSet support = random_particles(rng, 7, 5);
    const auto pts = rows_of(support);
    Vector x(5);
    for (double& v : x) v = 1.5 * rng.normal();
    const double lambda = 0.55;
    CHECK(kde_log_density(x, support, lambda) ==
          doctest::Approx(oracle::kde_log_density(x, pts, lambda)).epsilon(1e-12));
    const auto fd = oracle::fd_gradient(
        [&](std::span<const double> y) { return oracle::kde_log_density(y, pts, lambda); }, x);
    CHECK(oracle::relative_error(kde_log_density_grad(x, support, lambda), fd) < 1e-5);
  }
}

TEST_CASE("tilted score matches finite differences for learn and unlearn") {
  SeededRng rng(12);
  const ModelSpec m{3, 2};
  const AgentShard shard = random_shard(rng, m, 30);
  std::vector<std::vector<double>> xs;
  std::vector<std::size_t> ys;
  for (const auto& ex : shard.examples) {
    xs.push_back(ex.features);
    ys.push_back(ex.label);
  }
  KernelConfig kernels;
  for (Direction dir : {Direction::kLearn, Direction::kUnlearn}) {
    for (int t = 0; t < 20; ++t) {
      TiltedTarget target;
      target.global_particles = random_particles(rng, 6, m.dim());
      target.local_particles = random_particles(rng, 6, m.dim());
      target.data_grad = shard_loss_gradient(shard, m);
      target.temperature = 0.7;
      target.data_weight = 3.0;
      target.direction = dir;
      const auto q = rows_of(target.global_particles);
      const auto tk = rows_of(target.local_particles);
      const double sign = dir == Direction::kLearn ? -1.0 : 1.0;
      auto log_tilted = [&](std::span<const double> x) {
        return oracle::kde_log_density(x, q, kernels.kde_bandwidth) -
               oracle::kde_log_density(x, tk, kernels.kde_bandwidth) +
               sign * target.data_weight / target.temperature *
                   oracle::mean_cross_entropy(x, xs, ys, m.num_classes);
      };
      Vector x(m.dim());
      for (double& v : x) v = rng.normal();
      CHECK(oracle::relative_error(tilted_score(x, target, kernels), oracle::fd_gradient(log_tilted, x)) <
            1e-5);
    }
  }
}

TEST_CASE("tilted score with identical KDEs is the scaled data term") {
  SeededRng rng(13);
  const ModelSpec m{2, 3};
  const AgentShard shard = random_shard(rng, m, 20);
  TiltedTarget target;
  target.global_particles = random_particles(rng, 5, m.dim());
  target.local_particles = target.global_particles;
  target.data_grad = shard_loss_gradient(shard, m);
  target.temperature = 2.0;
  Vector x(m.dim());
  for (double& v : x) v = rng.normal();
  const Vector s = tilted_score(x, target, {});
  const Vector g = loss_and_grad(x, shard, m).grad;
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(-g[i] / 2.0).epsilon(1e-14));

  SUBCASE("learn and unlearn data terms are exact negations") {
    TiltedTarget un = target;
    un.direction = Direction::kUnlearn;
    un.local_particles = random_particles(rng, 5, m.dim());
    TiltedTarget le = un;
    le.direction = Direction::kLearn;
    const Vector a = tilted_score(x, le, {});
    const Vector b = tilted_score(x, un, {});
    TiltedTarget zero = le;
    zero.data_grad = [](std::span<const double> y) { return Vector(y.size(), 0.0); };
    const Vector kde = tilted_score(x, zero, {});
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs((a[i] - kde[i]) + (b[i] - kde[i])) < 1e-12);
  }
}

TEST_CASE("tilted target validation") {
  TiltedTarget target;
  target.global_particles = ParticleSet(2, 3);
  target.local_particles = ParticleSet(2, 4);
  target.data_grad = [](std::span<const double> y) { return Vector(y.size(), 0.0); };
  CHECK_THROWS_AS(target.validate(), InvalidInput);
  target.local_particles = ParticleSet(2, 3);
  target.temperature = 0.0;
  CHECK_THROWS_AS(target.validate(), InvalidInput);
}

TEST_CASE("adagrad accumulates squares and scales steps") {
  Matrix x(1, 2);
  Matrix g(1, 2);
  g(0, 0) = 2.0;
  g(0, 1) = -0.5;
  AdaGradState ada;
  adagrad_apply(x, g, ada);
  CHECK(x(0, 0) == doctest::Approx(0.1 * 2.0 / (1e-8 + 2.0)));
  CHECK(x(0, 1) == doctest::Approx(-0.1 * 0.5 / (1e-8 + 0.5)));
  const Matrix before = ada.accumulated;
  adagrad_apply(x, g, ada);
  CHECK(ada.accumulated(0, 0) == doctest::Approx(8.0));
  for (std::size_t i = 0; i < 2; ++i) CHECK(ada.accumulated.flat()[i] >= before.flat()[i]);
}

TEST_CASE("one-particle SVGD is AdaGrad gradient ascent") {
  ParticleSet p(1, 3);
  p(0, 0) = 1.0;
  p(0, 1) = -2.0;
  p(0, 2) = 0.5;
  const ScoreFn score = gaussian_score({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0});
  AdaGradState ada;
  const ParticleSet next = svgd_step(p, score, {}, ada);
  Matrix expect = p;
  Matrix dir(1, 3);
  const Vector s = score(p.row(0));
  std::copy(s.begin(), s.end(), dir.row(0).begin());
  AdaGradState ada2;
  adagrad_apply(expect, dir, ada2);
  for (std::size_t i = 0; i < 3; ++i) CHECK(next(0, i) == expect(0, i));
}

TEST_CASE("zero score leaves only the repulsion term") {
  SeededRng rng(14);
  const ParticleSet p = random_particles(rng, 4, 2);
  const double h = 1.3;
  const ScoreFn zero = [](std::span<const double> x) { return Vector(x.size(), 0.0); };
  const Matrix phi = stein_direction(p, zero, h);
  for (std::size_t n = 0; n < 4; ++n)
    for (std::size_t i = 0; i < 2; ++i) {
      double rep = 0.0;
      for (std::size_t j = 0; j < 4; ++j) rep += rbf_kernel_and_grad(p.row(j), p.row(n), h).grad_x[i];
      CHECK(phi(n, i) == doctest::Approx(rep / 4.0).epsilon(1e-12));
    }
  // Two particles push apart along the line joining them.
  ParticleSet pair(2, 1);
  pair(0, 0) = -0.5;
  pair(1, 0) = 0.5;
  const Matrix pp = stein_direction(pair, zero, 1.0);
  CHECK(pp(0, 0) < 0.0);
  CHECK(pp(1, 0) > 0.0);
}

TEST_CASE("parallel SVGD is bitwise identical to the reference") {
  SeededRng rng(15);
  const ModelSpec m{3, 4};
  const AgentShard shard = random_shard(rng, m, 40);
  TiltedTarget target;
  target.global_particles = random_particles(rng, 9, m.dim());
  target.local_particles = random_particles(rng, 9, m.dim());
  target.data_grad = shard_loss_gradient(shard, m);
  const ScoreFn score = make_score(target, {});
  ParticleSet a = target.global_particles, b = a;
  AdaGradState ada_a, ada_b;
  for (int step = 0; step < 5; ++step) {
    a = svgd_step(a, score, {}, ada_a);
    b = reference::svgd_step(b, score, {}, ada_b);
    CHECK(a == b);
  }
  CHECK(ada_a.accumulated == ada_b.accumulated);
  const double h = median_bandwidth(a, 1e-6);
  CHECK(stein_direction(a, score, h) == reference::stein_direction(a, score, h));
}

TEST_CASE("SVGD step is permutation equivariant") {
  SeededRng rng(16);
  const ParticleSet p = random_particles(rng, 6, 3);
  ParticleSet q(6, 3);
  for (std::size_t n = 0; n < 6; ++n) std::copy(p.row(5 - n).begin(), p.row(5 - n).end(), q.row(n).begin());
  const ScoreFn score = gaussian_score({1.0, 0.0, -1.0}, {1.0, 2.0, 0.5});
  AdaGradState a, b;
  const ParticleSet pn = svgd_step(p, score, {}, a);
  const ParticleSet qn = svgd_step(q, score, {}, b);
  for (std::size_t n = 0; n < 6; ++n)
    for (std::size_t i = 0; i < 3; ++i) CHECK(pn(n, i) == doctest::Approx(qn(5 - n, i)).epsilon(1e-13));
}

TEST_CASE("non-finite scores abort with the particle index") {
  ParticleSet p(3, 2);
  p(1, 0) = 1.0;
  p(2, 0) = 2.0;
  const ScoreFn bad = [](std::span<const double> x) {
    Vector g(x.size(), 0.0);
    if (x[0] == 1.0) g[0] = std::nan("");
    return g;
  };
  AdaGradState ada;
  try {
    (void)svgd_step(p, bad, {}, ada);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("particle") != std::string::npos);
  }
}

TEST_CASE("SVGD recovers the moments of a 2-D Gaussian") {
  SeededRng rng(17);
  const Vector mean{1.0, -2.0}, var{0.5, 2.0};
  const ScoreFn score = gaussian_score(mean, var);
  ParticleSet p = random_particles(rng, 50, 2);
  AdaGradState ada;
  ada.base_rate = 0.5;
  for (int step = 0; step < 2000; ++step) p = svgd_step(p, score, {}, ada);
  for (std::size_t i = 0; i < 2; ++i) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t n = 0; n < p.count(); ++n) s += p(n, i);
    const double mu = s / 50.0;
    for (std::size_t n = 0; n < p.count(); ++n) s2 += (p(n, i) - mu) * (p(n, i) - mu);
    CHECK(mu == doctest::Approx(mean[i]).epsilon(0.05).scale(1.0));
    CHECK(s2 / 49.0 == doctest::Approx(var[i]).epsilon(0.25));
  }
}
