#include "tcorr/norm_cone.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace tcorr;

namespace {

Vec vec3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

const NormKind kKinds[] = {NormKind::euclidean, NormKind::manhattan,
                           NormKind::supremum};

}  // namespace

TEST_CASE("norm values on a fixed vector") {
  Vec v = vec3(1.0, -2.0, 3.0);
  CHECK(norm({3, NormKind::euclidean}, v) == doctest::Approx(std::sqrt(14.0)));
  CHECK(norm({3, NormKind::manhattan}, v) == 6.0);
  CHECK(norm({3, NormKind::supremum}, v) == 3.0);
  CHECK(dual_norm({3, NormKind::manhattan}, v) == 3.0);  // dual of l1 is sup
  CHECK(dual_norm({3, NormKind::supremum}, v) == 6.0);
  CHECK_THROWS_AS(norm({2, NormKind::euclidean}, v), std::invalid_argument);
}

TEST_CASE("dual of the dual is the primal") {
  for (NormKind k : kKinds)
    CHECK(dual_kind(dual_kind(k)) == k);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec v(4);
    for (int i = 0; i < 4; ++i) v(i) = u(rng);
    for (NormKind k : kKinds) {
      NormCone c{4, k};
      NormCone dd{4, dual_kind(dual_kind(k))};
      CHECK(norm(c, v) == norm(dd, v));
    }
  }
}

TEST_CASE("pairing bound: |w.x| <= dual_norm(w) * norm(x)") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    for (NormKind k : kKinds) {
      NormCone cone{3, k};
      Vec w(3), x(3);
      for (int i = 0; i < 3; ++i) { w(i) = u(rng); x(i) = u(rng); }
      w = project_norm_ball(dual_kind(k), w, 1.0);
      CHECK(std::abs(w.dot(x)) <= norm(cone, x) + 1e-12);
    }
  }
}

TEST_CASE("state/effect validity and evaluation range") {
  NormCone manh{2, NormKind::manhattan};
  Vec x(2);
  x << 1.0, 0.0;
  CHECK_FALSE(is_valid_effect(manh, {0.5, x}));  // l1 norm 1 > min(t,1-t)
  x << 0.5, 0.0;
  CHECK(is_valid_effect(manh, {0.5, x}));
  CHECK_FALSE(is_valid_effect(manh, {1.2, Vec::Zero(2)}));
  CHECK_FALSE(is_valid_effect(manh, {-0.1, Vec::Zero(2)}));
  CHECK(is_valid_effect({3, NormKind::euclidean}, unit_effect(3)));

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0), u01(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    for (NormKind k : kKinds) {
      NormCone cone{3, k};
      Vec w(3), y(3);
      for (int i = 0; i < 3; ++i) { w(i) = u(rng); y(i) = u(rng); }
      GptState omega{project_norm_ball(dual_kind(k), w, 1.0)};
      double t = u01(rng);
      GptEffect f{t, project_norm_ball(k, y, std::min(t, 1.0 - t))};
      REQUIRE(is_valid_state(cone, omega));
      REQUIRE(is_valid_effect(cone, f));
      double p = evaluate(cone, omega, f);
      CHECK(p >= -1e-12);
      CHECK(p <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("ball projections are feasible, idempotent, and exact on examples") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-3.0, 3.0), ur(0.0, 1.5);
  for (int trial = 0; trial < 2000; ++trial) {
    for (NormKind k : kKinds) {
      Vec v(3);
      for (int i = 0; i < 3; ++i) v(i) = u(rng);
      double r = ur(rng);
      Vec pv = project_norm_ball(k, v, r);
      CHECK(norm({3, k}, pv) <= r + 1e-12);
      CHECK((project_norm_ball(k, pv, r) - pv).norm() <= 1e-12);
      if (norm({3, k}, v) <= r) CHECK((pv - v).norm() == 0.0);
    }
  }
  // l1 projection of (3,1) onto radius 2: soft threshold at 1 -> (2,0)
  Vec v(2);
  v << 3.0, 1.0;
  Vec p = project_norm_ball(NormKind::manhattan, v, 2.0);
  CHECK(p(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p(1) == doctest::Approx(0.0).epsilon(1e-14));
  // a radius far below the rounding granularity still yields a feasible point
  Vec w(2);
  w << 0.5, 0.5;
  Vec q = project_norm_ball(NormKind::manhattan, w, 1e-18);
  CHECK(q.lpNorm<1>() <= 1e-18);
}

TEST_CASE("effect projection lands in the cone and fixes interior points") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> ut(-1.0, 2.0), ux(-3.0, 3.0);
  for (int trial = 0; trial < 5000; ++trial) {
    for (NormKind k : kKinds) {
      NormCone cone{2, k};
      double t = ut(rng);
      Vec x(2);
      for (int i = 0; i < 2; ++i) x(i) = ux(rng);
      project_effect_params(cone, t, x);
      CHECK(is_valid_effect(cone, {t, x}, 1e-12));
    }
  }
  NormCone cone{2, NormKind::euclidean};
  double t = 0.4;
  Vec x(2);
  x << 0.2, 0.1;
  Vec x0 = x;
  project_effect_params(cone, t, x);
  CHECK(t == 0.4);
  CHECK((x - x0).norm() == 0.0);
}

TEST_CASE("effect projection is metric-nearest (grid cross-check)") {
  // compare against a dense scan over the feasible set for n=1
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> ut(-0.5, 1.5), ux(-1.5, 1.5);
  NormCone cone{1, NormKind::euclidean};
  for (int trial = 0; trial < 50; ++trial) {
    double t0 = ut(rng), x0 = ux(rng);
    double t = t0;
    Vec x(1);
    x << x0;
    project_effect_params(cone, t, x);
    double got = (t - t0) * (t - t0) + (x(0) - x0) * (x(0) - x0);
    double best = 1e99;
    const int g = 400;
    for (int i = 0; i <= g; ++i) {
      double tc = static_cast<double>(i) / g;
      double lim = std::min(tc, 1.0 - tc);
      double xc = std::clamp(x0, -lim, lim);
      best = std::min(best,
                      (tc - t0) * (tc - t0) + (xc - x0) * (xc - x0));
    }
    CHECK(got <= best + 1e-4);  // grid resolution dominates the slack
  }
}

TEST_CASE("canonical distinguishable pair validates on every cone") {
  for (NormKind k : kKinds)
    for (int n : {1, 2, 3, 5}) {
      NormCone cone{n, k};
      CHECK(check_capacity_witness(cone, canonical_capacity_pair(cone), 1e-12));
    }
}

TEST_CASE("witness checker rejects broken data") {
  NormCone cone{3, NormKind::euclidean};
  CapacityWitness w = canonical_capacity_pair(cone);
  SUBCASE("count mismatch") {
    w.effects.pop_back();
    CHECK_FALSE(check_capacity_witness(cone, w, 1e-12));
  }
  SUBCASE("pairing broken") {
    w.effects[0].t = 0.4;
    CHECK_FALSE(check_capacity_witness(cone, w, 1e-12));
  }
  SUBCASE("subunit sum broken") {
    // two copies of the same effect: pairings with state 1 fail
    w.effects[1] = w.effects[0];
    CHECK_FALSE(check_capacity_witness(cone, w, 1e-12));
  }
}

TEST_CASE("capacity search finds two states and never three") {
  for (NormKind k : kKinds) {
    NormCone cone{3, k};
    auto two = search_capacity(cone, 2, 8, 42);
    REQUIRE(two.witness.has_value());
    // penalty <= 1e-9 caps each pairing residual at ~3e-5
    CHECK(check_capacity_witness(cone, *two.witness, 1e-4));
    CHECK(two.best_penalty <= 1e-9);

    auto three = search_capacity(cone, 3, 5, 42);
    CHECK_FALSE(three.witness.has_value());
    CHECK(three.best_penalty >= 0.4 - 1e-12);
  }
  CHECK_THROWS_AS(search_capacity({3, NormKind::euclidean}, 0, 1, 1),
                  std::invalid_argument);
}
