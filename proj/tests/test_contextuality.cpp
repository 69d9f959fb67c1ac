#include "tcorr/contextuality.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

using namespace tcorr;

namespace {

using Cplx = std::complex<double>;

CMat proj(const Eigen::Vector2cd& psi) { return psi * psi.adjoint(); }

Eigen::Vector2cd e0() { return Eigen::Vector2cd(1, 0); }
Eigen::Vector2cd e1() { return Eigen::Vector2cd(0, 1); }
Eigen::Vector2cd plus() { return Eigen::Vector2cd(1, 1) / std::sqrt(2.0); }

KrausInstrument vn_instrument(const Eigen::Vector2cd& psi) {
  const CMat P = proj(psi);
  const CMat Q = CMat::Identity(2, 2) - P;
  return measure_and_prepare({P, Q}, {P, Q});
}

// same projectors, outputs swapped
KrausInstrument relabeled_z() {
  const CMat P0 = proj(e0()), P1 = proj(e1());
  return measure_and_prepare({P1, P0}, {P1, P0});
}

QuantumMachine pair_machine(const CMat& rho0) {
  QuantumMachine m;
  m.rho0 = rho0;
  m.instruments = {vn_instrument(e0()), relabeled_z()};
  return m;
}

const ContextStructure pair_ctx{2, {{0, 1}}};

}  // namespace

TEST_CASE("relabeled projective pair admits a one-state model") {
  QuantumMachine m = pair_machine(proj(plus()));

  CheckReport rr = check_repeatability(m, pair_ctx, 4);
  CHECK(rr.pass);
  CHECK(rr.max_defect <= 1e-12);
  CheckReport rp = check_permutation_invariance(m, pair_ctx, 4);
  CHECK(rp.pass);
  CHECK(rp.max_defect <= 1e-12);

  auto s0 = is_projective_mnp(m.instruments[0]);
  auto s1 = is_projective_mnp(m.instruments[1]);
  REQUIRE(s0);
  REQUIRE(s1);
  CHECK(std::abs((*s0)[0].dot(e0())) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs((*s0)[1].dot(e1())) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs((*s1)[0].dot(e1())) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs((*s1)[1].dot(e0())) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(overlap_dichotomy_check({*s0, *s1}));

  NoncontextualModel model = build_noncontextual_model(m, pair_ctx, 0);
  CHECK(model.context == std::vector<int>{0, 1});
  CHECK(model.p_ref(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(model.p_ref(1) == doctest::Approx(0.5).epsilon(1e-12));
  // reference relabels to itself, the partner swaps outputs
  CHECK(model.f[0][0](0) == 1.0);
  CHECK(model.f[0][0](1) == 0.0);
  CHECK(model.f[0][1](0) == 0.0);
  CHECK(model.f[0][1](1) == 1.0);

  for (int L = 1; L <= 4; ++L)
    for (std::size_t xi = 0; xi < ipow(2, L); ++xi)
      for (std::size_t ai = 0; ai < ipow(2, L); ++ai) {
        Seq xs = unpack(xi, 2, L), as = unpack(ai, 2, L);
        CHECK(model_prob(model, xs, as) ==
              doctest::Approx(sequence_prob(m, xs, as)).epsilon(1e-12));
      }

  CHECK_THROWS_AS(model_prob(model, {5}, {0}), std::out_of_range);
}

TEST_CASE("weak measurements fail the projective decision and repetition") {
  const CMat P0 = proj(e0()), P1 = proj(e1());
  KrausInstrument weak;
  weak.kraus = {{std::sqrt(0.9) * P0 + std::sqrt(0.1) * P1},
                {std::sqrt(0.1) * P0 + std::sqrt(0.9) * P1}};
  REQUIRE(weak.unital());
  CHECK_FALSE(is_projective_mnp(weak).has_value());

  QuantumMachine m;
  m.rho0 = proj(e0());
  m.instruments = {weak};
  ContextStructure ctx{1, {{0}}};
  CHECK_FALSE(check_repeatability(m, ctx, 3).pass);
  CHECK_THROWS_WITH_AS(build_noncontextual_model(m, ctx, 0),
                       "repeatability check failed", std::runtime_error);
}

TEST_CASE("noncommuting inputs in one declared context are rejected") {
  QuantumMachine m;
  m.rho0 = proj(e0());
  m.instruments = {vn_instrument(e0()), vn_instrument(plus())};

  CheckReport rr = check_repeatability(m, pair_ctx, 3);
  CHECK_FALSE(rr.pass);
  CHECK(rr.max_defect >= 0.2);
  CheckReport rp = check_permutation_invariance(m, pair_ctx, 2);
  CHECK_FALSE(rp.pass);
  CHECK(rp.max_defect >= 0.2);

  CHECK_THROWS_AS(build_noncontextual_model(m, pair_ctx, 0),
                  std::runtime_error);
}

TEST_CASE("instruments that dephase within an outcome are rejected") {
  const CMat P0 = proj(e0()), P1 = proj(e1());
  const double r = 1.0 / std::sqrt(2.0);
  KrausInstrument deph;
  deph.kraus = {{r * P0, r * P1}, {r * P0, r * P1}};
  REQUIRE(deph.unital());
  CHECK_FALSE(is_projective_mnp(deph).has_value());
}

TEST_CASE("overlap dichotomy separates compatible from tilted rays") {
  CHECK(overlap_dichotomy_check({{e0()}, {e1()}}));
  CHECK(overlap_dichotomy_check({{e0()}, {e0()}}));
  CHECK(overlap_dichotomy_check({{e0(), e1()}, {e1(), e0()}}));
  CHECK_FALSE(overlap_dichotomy_check({{e0()}, {plus()}}));
}

TEST_CASE("context merging and argument guards") {
  ContextStructure merged = merge_contexts({4, {{0, 1}, {1, 2}, {3}}});
  REQUIRE(merged.contexts.size() == 2);
  CHECK(merged.contexts[0] == std::vector<int>{0, 1, 2});
  CHECK(merged.contexts[1] == std::vector<int>{3});
  CHECK(merge_contexts({2, {{1, 1, 0}}}).contexts[0] ==
        std::vector<int>{0, 1});
  CHECK_THROWS_AS(merge_contexts({2, {{0, 5}}}), std::invalid_argument);

  QuantumMachine m = pair_machine(proj(e0()));
  CHECK_THROWS_AS(check_repeatability(m, pair_ctx, 1), std::invalid_argument);
  CHECK_THROWS_AS(check_permutation_invariance(m, pair_ctx, 1),
                  std::invalid_argument);

  KrausInstrument qutrit;
  qutrit.kraus = {{CMat::Identity(3, 3)}};
  CHECK_THROWS_AS(is_projective_mnp(qutrit), std::invalid_argument);
}

TEST_CASE("random rank-one repeaters pass, random weak pointers fail") {
  std::mt19937_64 rng(91);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.55, 0.95);
  for (int trial = 0; trial < 60; ++trial) {
    Eigen::Vector2cd psi(Cplx(g(rng), g(rng)), Cplx(g(rng), g(rng)));
    psi.normalize();
    const CMat P = proj(psi);
    const CMat Q = CMat::Identity(2, 2) - P;

    auto st = is_projective_mnp(measure_and_prepare({P, Q}, {P, Q}));
    REQUIRE(st);
    // returned rays span the measured basis
    double o = std::abs((*st)[0].dot(psi));
    CHECK((std::abs(o - 1.0) <= 1e-10 || o <= 1e-10));
    // and the instrument acts as X -> <psi|X|psi> |psi><psi|
    CMat A(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) A(i, j) = Cplx(g(rng), g(rng));
    CMat H = A + A.adjoint();
    KrausInstrument inst = measure_and_prepare({P, Q}, {P, Q});
    for (int a = 0; a < 2; ++a) {
      const Eigen::Vector2cd& ray = (*st)[a];
      Cplx val = (ray.adjoint() * H * ray)(0);
      CHECK((inst.apply(a, H) - val.real() * proj(ray)).norm() <= 1e-10);
    }

    double w = u(rng);
    KrausInstrument weak;
    weak.kraus = {{std::sqrt(w) * P + std::sqrt(1 - w) * Q},
                  {std::sqrt(1 - w) * P + std::sqrt(w) * Q}};
    CHECK_FALSE(is_projective_mnp(weak).has_value());
  }
}

TEST_CASE("elimination queries on degenerate and spread initial states") {
  QuantumMachine spread = pair_machine(proj(plus()));
  CHECK(reachable_prestates(spread, pair_ctx, 0, 4).size() == 3);
  CHECK(constant_output_inputs(spread, pair_ctx, 4).empty());
  CHECK(fixed_prestate_inputs(spread, pair_ctx, 4).empty());

  QuantumMachine frozen = pair_machine(proj(e0()));
  CHECK(reachable_prestates(frozen, pair_ctx, 0, 4).size() == 1);
  CHECK(constant_output_inputs(frozen, pair_ctx, 4) ==
        std::vector<int>{0, 1});
  CHECK(fixed_prestate_inputs(frozen, pair_ctx, 4) ==
        std::vector<int>{0, 1});

  // eliminable inputs do not change the verdict
  NoncontextualModel model = build_noncontextual_model(frozen, pair_ctx, 0);
  CHECK(model.p_ref(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.p_ref(1) == doctest::Approx(0.0).epsilon(1e-12));
}
