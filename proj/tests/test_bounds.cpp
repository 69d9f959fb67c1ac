#include "tcorr/bounds.hpp"

#include "tcorr/correlations.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

using namespace tcorr;

namespace {

Vec vec1(double v) {
  Vec x(1);
  x << v;
  return x;
}

// cbit spec from evaluation coordinates: effect values (a, b) on the two
// pure states, prepared states (s, 1-s)
SMachineSpec cbit_spec(double a0, double b0, double a1, double b1, double s0,
                       double s1) {
  SMachineSpec spec;
  spec.theory = Theory::cbit;
  spec.cone = NormCone{1, NormKind::euclidean};
  spec.omega = GptState{vec1(1.0)};
  spec.f00 = GptEffect{(a0 + b0) / 2, vec1((a0 - b0) / 2)};
  spec.f11 = GptEffect{(a1 + b1) / 2, vec1((a1 - b1) / 2)};
  spec.sigma00 = GptState{vec1(2 * s0 - 1)};
  spec.sigma11 = GptState{vec1(2 * s1 - 1)};
  return spec;
}

double table_functional(const SMachineSpec& spec) {
  return s_functional(machine_table(build_machine(spec), 2));
}

}  // namespace

TEST_CASE("classical optimum is 9/4 at the known unique point") {
  CbitOptimum opt = omega_cbit_exact();
  CHECK(opt.value == Rational(9, 4));
  CHECK(opt.a0 == Rational(1, 2));
  CHECK(opt.a1 == Rational(1));
  CHECK(opt.b0 == Rational(1));
  CHECK(opt.b1 == Rational(0));
  CHECK(opt.s0 == Rational(1));
  CHECK(opt.s1 == Rational(0));
  CHECK(opt.spec.valid());
  CHECK(eval_S(opt.spec) == 2.25);
  CHECK(table_functional(opt.spec) == 2.25);
}

TEST_CASE("no classical point beats 9/4") {
  // corner values for the linear directions, grid for the quadratic ones
  double best = 0.0;
  for (int s0 = 0; s0 <= 1; ++s0)
    for (int s1 = 0; s1 <= 1; ++s1)
      for (int b0 = 0; b0 <= 1; ++b0)
        for (int b1 = 0; b1 <= 1; ++b1)
          for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
              SMachineSpec spec =
                  cbit_spec(i / 20.0, b0, j / 20.0, b1, s0, s1);
              REQUIRE(spec.valid());
              double v = eval_S(spec);
              CHECK(v <= 2.25 + 1e-14);
              best = std::max(best, v);
            }
  CHECK(best == 2.25);

  std::mt19937_64 rng(81);
  NormCone line{1, NormKind::euclidean};
  for (int trial = 0; trial < 3000; ++trial) {
    SMachineSpec spec = random_spec(line, Theory::cbit, rng);
    CHECK(eval_S(spec) <= 2.25 + 1e-12);
  }
}

TEST_CASE("functional value matches the built machine's table") {
  std::mt19937_64 rng(82);
  struct Case {
    NormCone cone;
    Theory theory;
  };
  const Case cases[] = {
      {{1, NormKind::euclidean}, Theory::cbit},
      {{3, NormKind::euclidean}, Theory::qubit},
      {{2, NormKind::manhattan}, Theory::gbit},
      {{4, NormKind::euclidean}, Theory::hbit},
      {{2, NormKind::supremum}, Theory::norm_cone},
      {{3, NormKind::manhattan}, Theory::norm_cone},
  };
  for (const Case& c : cases) {
    for (int trial = 0; trial < 25; ++trial) {
      SMachineSpec spec = random_spec(c.cone, c.theory, rng);
      REQUIRE(spec.valid(1e-9));
      double v = eval_S(spec);
      CHECK(v <= 3.0 + 1e-12);
      CHECK(v == doctest::Approx(table_functional(spec)).epsilon(1e-10));
    }
  }
}

TEST_CASE("classical and quantum builds agree with the cone picture") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 10; ++trial) {
    SMachineSpec cs =
        random_spec(NormCone{1, NormKind::euclidean}, Theory::cbit, rng);
    CorrelationTable ta = machine_table(build_classical(cs), 2);
    CorrelationTable tb = machine_table(build_machine(cs), 2);
    CHECK((ta.p - tb.p).cwiseAbs().maxCoeff() <= 1e-10);

    SMachineSpec qs =
        random_spec(NormCone{3, NormKind::euclidean}, Theory::qubit, rng);
    CorrelationTable tc = machine_table(build_quantum(qs), 2);
    CorrelationTable td = machine_table(build_machine(qs), 2);
    CHECK((tc.p - td.p).cwiseAbs().maxCoeff() <= 1e-10);
  }
  CHECK_THROWS_AS(build_classical(gbit_construction()), std::invalid_argument);
  CHECK_THROWS_AS(build_quantum(gbit_construction()), std::invalid_argument);
}

TEST_CASE("qubit reference point pins the expected value") {
  SMachineSpec spec = qubit_spec_from_parameters(qubit_reference_parameters());
  double v = eval_S(spec);
  CHECK(v == doctest::Approx(2.3557032197689383).epsilon(1e-12));
  CHECK(std::abs(v - 2.35570) <= 2e-3);
  // the rounded amplitudes sit a few 1e-6 outside the effect interval
  CHECK(spec.valid(1e-4));
  CHECK_FALSE(spec.valid(1e-9));
}

TEST_CASE("qubit ascent reports feasible certified values") {
  OptimizationResult single = optimize_qubit(1, 7);
  CHECK(single.best_value == 1.0);  // pinned start is a stationary plateau

  OptimizationResult res = optimize_qubit(4, 7);
  CHECK(res.per_restart.size() == 4);
  CHECK(res.restarts_used == 4);
  CHECK(res.best_value ==
        *std::max_element(res.per_restart.begin(), res.per_restart.end()));
  CHECK(res.best_value <= 2.35580);
  SMachineSpec spec = qubit_spec_from_parameters(res.parameters);
  CHECK(spec.valid(1e-9));
  CHECK(eval_S(spec) == doctest::Approx(res.best_value).epsilon(1e-10));
}

TEST_CASE("norm-cone ascent reproduces the frozen landmarks") {
  OptimizationResult line =
      optimize_norm_cone(NormCone{1, NormKind::euclidean}, 16, 42);
  CHECK(line.best_value == doctest::Approx(2.25).epsilon(1e-10));

  OptimizationResult ball =
      optimize_norm_cone(NormCone{3, NormKind::euclidean}, 16, 42);
  CHECK(ball.best_value == doctest::Approx(2.3557032017400275).epsilon(1e-9));
  SMachineSpec bs = cone_spec_from_parameters(NormCone{3, NormKind::euclidean},
                                              ball.parameters);
  CHECK(bs.valid(1e-9));
  CHECK(eval_S(bs) == doctest::Approx(ball.best_value).epsilon(1e-10));

  OptimizationResult square =
      optimize_norm_cone(NormCone{2, NormKind::manhattan}, 16, 42);
  CHECK(square.best_value == doctest::Approx(3.0).epsilon(1e-12));

  // separation chain: interval < ball < square
  CHECK(ball.best_value - line.best_value >= 0.1);
  CHECK(3.0 - ball.best_value >= 0.6);
}

TEST_CASE("square-state construction reaches the algebraic maximum") {
  SMachineSpec spec = gbit_construction();
  CHECK(spec.theory == Theory::gbit);
  CHECK(spec.cone.kind == NormKind::manhattan);
  CHECK(spec.cone.n == 2);
  CHECK(spec.valid(1e-12));
  CHECK(eval_S(spec) == 3.0);

  GptMachine m = build_machine(spec);
  CHECK(m.probability_preserving(1e-12));
  CorrelationTable t = machine_table(m, 2);
  CHECK(t.at({0, 0}, {0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.at({1, 0}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.at({1, 1}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s_functional(t) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("hyperball spaces keep a gap to the algebraic maximum") {
  CHECK(hbit_gap_check(1, 16, 42));
  CHECK(hbit_gap_check(3, 16, 42));
}
