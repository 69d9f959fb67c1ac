#include "tcorr/gpt_machine.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

using namespace tcorr;

namespace {

using Cplx = std::complex<double>;

Vec rand_ball(NormKind kind, int n, double r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return project_norm_ball(kind, v, r);
}

GptState rand_state(const NormCone& cone, std::mt19937_64& rng) {
  return GptState{rand_ball(dual_kind(cone.kind), cone.n, 1.0, rng)};
}

GptEffect rand_effect(const NormCone& cone, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double t = u(rng);
  return GptEffect{t, rand_ball(cone.kind, cone.n, std::min(t, 1.0 - t), rng)};
}

CMat random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMat A(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) A(i, j) = Cplx(g(rng), g(rng));
  CMat rho = A * A.adjoint();
  return rho / rho.trace();
}

CMat random_qubit_effect(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CMat rho = random_density(rng);
  Eigen::SelfAdjointEigenSolver<CMat> es(rho);
  Eigen::Vector2d vals(u(rng), u(rng));
  return es.eigenvectors() * vals.asDiagonal().toDenseMatrix().cast<Cplx>() *
         es.eigenvectors().adjoint();
}

ClassicalMachine random_classical2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ClassicalMachine m;
  m.d = 2;
  m.pi = Eigen::VectorXd(2);
  m.pi << u(rng), 0.0;
  m.pi(1) = 1.0 - m.pi(0);
  m.T.assign(2, std::vector<Eigen::MatrixXd>(2, Eigen::MatrixXd(2, 2)));
  for (int x = 0; x < 2; ++x)
    for (int s = 0; s < 2; ++s) {
      Eigen::VectorXd row(4);
      for (int i = 0; i < 4; ++i) row(i) = u(rng);
      row /= row.sum();
      for (int a = 0; a < 2; ++a)
        for (int sp = 0; sp < 2; ++sp) m.T[x][a](s, sp) = row(a * 2 + sp);
    }
  return m;
}

}  // namespace

TEST_CASE("identity and zero transformations") {
  GptTransformation id = GptTransformation::identity(3);
  GptTransformation zero = GptTransformation::zero(3);
  std::mt19937_64 rng(41);
  NormCone cone{3, NormKind::euclidean};
  for (int trial = 0; trial < 20; ++trial) {
    GptEffect g = rand_effect(cone, rng);
    GptEffect gi = apply(id, g);
    CHECK(gi.t == g.t);
    CHECK((gi.x - g.x).norm() == 0.0);
    GptEffect gz = apply(zero, g);
    CHECK(gz.t == 0.0);
    CHECK(gz.x.norm() == 0.0);
  }
  CHECK_THROWS_AS(apply(id, unit_effect(2)), std::invalid_argument);
}

TEST_CASE("measure-and-prepare block acts as g -> prepared(g) * effect") {
  std::mt19937_64 rng(42);
  const NormKind kinds[] = {NormKind::euclidean, NormKind::manhattan,
                            NormKind::supremum};
  for (NormKind k : kinds) {
    NormCone cone{3, k};
    for (int trial = 0; trial < 40; ++trial) {
      GptEffect f = rand_effect(cone, rng);
      GptState w = rand_state(cone, rng);
      GptTransformation tr = mnp_transformation(f, w);
      GptEffect g = rand_effect(cone, rng);
      GptEffect img = apply(tr, g);
      double pre = evaluate(cone, w, g);
      CHECK(img.t == doctest::Approx(pre * f.t).epsilon(1e-13));
      CHECK((img.x - pre * f.x).cwiseAbs().maxCoeff() <= 1e-13);
      // the unit maps to the measuring effect
      GptEffect ue = apply(tr, unit_effect(3));
      CHECK(ue.t == doctest::Approx(f.t).epsilon(1e-14));
      CHECK((ue.x - f.x).cwiseAbs().maxCoeff() <= 1e-14);
    }
  }
  // zero effect gives the zero transformation
  GptTransformation z =
      mnp_transformation(GptEffect{0.0, Vec::Zero(2)},
                         GptState{Vec::Constant(2, 0.5)});
  CHECK(z.t == 0.0);
  CHECK(z.alpha.norm() == 0.0);
  CHECK(z.f.norm() == 0.0);
  CHECK(z.B.norm() == 0.0);
}

TEST_CASE("complete instruments preserve probability") {
  std::mt19937_64 rng(43);
  NormCone cone{2, NormKind::manhattan};
  GptMachine m;
  m.cone = cone;
  m.omega0 = rand_state(cone, rng);
  for (int x = 0; x < 2; ++x) {
    GptEffect f = rand_effect(cone, rng);
    GptEffect comp{1.0 - f.t, Vec(-f.x)};
    m.instruments.push_back({mnp_transformation(f, rand_state(cone, rng)),
                             mnp_transformation(comp, rand_state(cone, rng))});
  }
  CHECK(m.probability_preserving(1e-12));

  GptMachine broken = m;
  broken.instruments[0][1] = GptTransformation::zero(2);
  CHECK_FALSE(broken.probability_preserving(1e-12));

  CorrelationTable t = machine_table(m, 3);
  for (std::size_t xi = 0; xi < t.num_input_seqs(); ++xi) {
    double mass = 0.0;
    for (std::size_t ai = 0; ai < t.num_output_seqs(); ++ai)
      mass += t.at(unpack(xi, 2, 3), unpack(ai, 2, 3));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("transformation validation on extremal and sampled duals") {
  for (NormKind k : {NormKind::manhattan, NormKind::supremum}) {
    NormCone cone{3, k};
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 30; ++trial) {
      GptTransformation tr =
          mnp_transformation(rand_effect(cone, rng), rand_state(cone, rng));
      CHECK(validate_transformation(cone, tr, ValidationMode::exact));
    }
    GptTransformation dbl = GptTransformation::identity(3);
    dbl.B *= 2.0;
    CHECK_FALSE(validate_transformation(cone, dbl, ValidationMode::exact));
  }

  NormCone eu{3, NormKind::euclidean};
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 30; ++trial) {
    GptTransformation tr =
        mnp_transformation(rand_effect(eu, rng), rand_state(eu, rng));
    CHECK(validate_transformation(eu, tr, ValidationMode::sampled));
  }
  GptTransformation dbl = GptTransformation::identity(3);
  dbl.B *= 2.0;
  CHECK_FALSE(validate_transformation(eu, dbl, ValidationMode::sampled));
  CHECK_THROWS_AS(
      validate_transformation(eu, GptTransformation::identity(3),
                              ValidationMode::exact),
      std::invalid_argument);
}

TEST_CASE("two-state classical machines embed into the n=1 cone") {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 25; ++trial) {
    ClassicalMachine m = random_classical2(rng);
    REQUIRE(m.valid(1e-12));
    GptMachine g = classical_to_gpt(m);
    CHECK(g.probability_preserving(1e-10));
    for (int L : {1, 2, 3}) {
      CorrelationTable tc = machine_table(m, L);
      CorrelationTable tg = machine_table(g, L);
      for (std::size_t xi = 0; xi < tc.num_input_seqs(); ++xi)
        for (std::size_t ai = 0; ai < tc.num_output_seqs(); ++ai) {
          Seq xs = unpack(xi, 2, L), as = unpack(ai, 2, L);
          CHECK(tc.at(xs, as) ==
                doctest::Approx(tg.at(xs, as)).epsilon(1e-12));
        }
    }
  }
  ClassicalMachine big;
  big.d = 3;
  CHECK_THROWS_AS(classical_to_gpt(big), std::invalid_argument);
}

TEST_CASE("Bloch correspondence is exact") {
  std::mt19937_64 rng(47);
  NormCone eu{3, NormKind::euclidean};
  for (int trial = 0; trial < 100; ++trial) {
    CMat rho = random_density(rng);
    CMat E = random_qubit_effect(rng);
    GptState w = bloch_state(rho);
    GptEffect f = bloch_effect(E);
    CHECK(is_valid_state(eu, w, 1e-12));
    CHECK(is_valid_effect(eu, f, 1e-12));
    // pairing carries over exactly
    CHECK(evaluate(eu, w, f) ==
          doctest::Approx((rho * E).trace().real()).epsilon(1e-13));
    // round trips
    CHECK((bloch_state_to_density(w) - rho).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((bloch_effect_to_matrix(f) - E).cwiseAbs().maxCoeff() <= 1e-13);
  }
  // real pure state (u, v) lands at (2uv, 0, u^2 - v^2)
  double th = 0.3;
  Eigen::Vector2cd psi(Cplx(std::cos(th), 0), Cplx(std::sin(th), 0));
  GptState w = bloch_state(psi * psi.adjoint());
  CHECK(w.w(0) == doctest::Approx(std::sin(2 * th)).epsilon(1e-14));
  CHECK(w.w(1) == 0.0);
  CHECK(w.w(2) == doctest::Approx(std::cos(2 * th)).epsilon(1e-14));
}

TEST_CASE("qubit machines agree across the quantum and cone pictures") {
  std::mt19937_64 rng(48);
  NormCone eu{3, NormKind::euclidean};
  for (int trial = 0; trial < 10; ++trial) {
    CMat rho0 = random_density(rng);
    QuantumMachine qm;
    qm.rho0 = rho0;
    GptMachine gm;
    gm.cone = eu;
    gm.omega0 = bloch_state(rho0);
    for (int x = 0; x < 2; ++x) {
      CMat E = random_qubit_effect(rng);
      CMat s0 = random_density(rng), s1 = random_density(rng);
      qm.instruments.push_back(
          measure_and_prepare({E, CMat::Identity(2, 2) - E}, {s0, s1}));
      gm.instruments.push_back(
          {mnp_transformation(bloch_effect(E), bloch_state(s0)),
           mnp_transformation(bloch_effect(CMat::Identity(2, 2) - E),
                              bloch_state(s1))});
    }
    for (int L : {1, 2, 3}) {
      CorrelationTable tq = machine_table(qm, L);
      CorrelationTable tg = machine_table(gm, L);
      for (std::size_t xi = 0; xi < tq.num_input_seqs(); ++xi)
        for (std::size_t ai = 0; ai < tq.num_output_seqs(); ++ai) {
          Seq xs = unpack(xi, 2, L), as = unpack(ai, 2, L);
          CHECK(tq.at(xs, as) ==
                doctest::Approx(tg.at(xs, as)).epsilon(1e-10));
        }
    }
  }
}
