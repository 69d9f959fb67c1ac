#include "tcorr/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace tcorr {

namespace {

GptEffect complement(const GptEffect& f) { return {1.0 - f.t, Vec(-f.x)}; }

Eigen::Matrix2d sym2(double a, double b, double c) {
  Eigen::Matrix2d m;
  m << a, b, b, c;
  return m;
}

}  // namespace

bool SMachineSpec::valid(double tol) const {
  switch (theory) {
    case Theory::cbit:
      if (cone.n != 1) return false;
      break;
    case Theory::qubit:
      if (cone.n != 3 || cone.kind != NormKind::euclidean) return false;
      break;
    case Theory::hbit:
      if (cone.kind != NormKind::euclidean) return false;
      break;
    case Theory::gbit:
      if (cone.n != 2 || cone.kind != NormKind::manhattan) return false;
      break;
    case Theory::norm_cone:
      break;
  }
  return is_valid_state(cone, omega, tol) && is_valid_state(cone, sigma00, tol) &&
         is_valid_state(cone, sigma11, tol) && is_valid_effect(cone, f00, tol) &&
         is_valid_effect(cone, f11, tol);
}

double eval_S(const SMachineSpec& s) {
  GptEffect diff{s.f00.t - s.f11.t, Vec(s.f00.x - s.f11.x)};
  return evaluate(s.cone, s.omega, s.f00) * (1.0 - evaluate(s.cone, s.sigma00, s.f00)) +
         evaluate(s.cone, s.omega, s.f11) * (1.0 + evaluate(s.cone, s.sigma11, diff));
}

GptMachine build_machine(const SMachineSpec& s) {
  GptState center{Vec::Zero(s.cone.n)};
  GptMachine m;
  m.cone = s.cone;
  m.omega0 = s.omega;
  m.instruments = {{mnp_transformation(s.f00, s.sigma00),
                    mnp_transformation(complement(s.f00), center)},
                   {mnp_transformation(complement(s.f11), center),
                    mnp_transformation(s.f11, s.sigma11)}};
  return m;
}

ClassicalMachine build_classical(const SMachineSpec& s) {
  if (s.theory != Theory::cbit || s.cone.n != 1)
    throw std::invalid_argument("build_classical expects a cbit spec");
  auto dist = [](const GptState& st) {
    return Eigen::Vector2d(0.5 * (1.0 + st.w(0)), 0.5 * (1.0 - st.w(0)));
  };
  auto resp = [](const GptEffect& f) {
    return Eigen::Vector2d(f.t + f.x(0), f.t - f.x(0));
  };
  // T[x][a](s, s') = f_{a|x}(s) * sigma_{a|x}(s')
  auto branch = [](const Eigen::Vector2d& r, const Eigen::Vector2d& q) {
    return Eigen::MatrixXd(r * q.transpose());
  };
  const Eigen::Vector2d half(0.5, 0.5);
  ClassicalMachine m;
  m.d = 2;
  m.n_inputs = 2;
  m.n_outputs = 2;
  m.pi = dist(s.omega);
  m.T = {{branch(resp(s.f00), dist(s.sigma00)),
          branch(resp(complement(s.f00)), half)},
         {branch(resp(complement(s.f11)), half),
          branch(resp(s.f11), dist(s.sigma11))}};
  return m;
}

QuantumMachine build_quantum(const SMachineSpec& s) {
  if (s.theory != Theory::qubit)
    throw std::invalid_argument("build_quantum expects a qubit spec");
  const CMat I = CMat::Identity(2, 2);
  const CMat E00 = bloch_effect_to_matrix(s.f00);
  const CMat E11 = bloch_effect_to_matrix(s.f11);
  const CMat mixed = 0.5 * I;
  QuantumMachine m;
  m.rho0 = bloch_state_to_density(s.omega);
  m.instruments = {
      measure_and_prepare({E00, I - E00},
                          {bloch_state_to_density(s.sigma00), mixed}),
      measure_and_prepare({I - E11, E11},
                          {mixed, bloch_state_to_density(s.sigma11)})};
  return m;
}

// ---------------------------------------------------------------------------
// exact classical maximum

namespace {

using R = Rational;

// S restricted to a vertex of the (s0,s1,b0,b1) cube is
// c00 a0^2 + c11 a1^2 + c01 a0 a1 + c0 a0 + c1 a1
struct Quad {
  R c00, c11, c01, c0, c1;

  R at(const R& a0, const R& a1) const {
    return c00 * a0 * a0 + c11 * a1 * a1 + c01 * a0 * a1 + c0 * a0 + c1 * a1;
  }
};

bool in_unit(const R& v) { return v >= R(0) && v <= R(1); }

// exact maximum over [0,1]^2: corners, edge vertices, interior critical point
std::pair<R, std::pair<R, R>> quad_max(const Quad& q) {
  std::vector<std::pair<R, R>> cand = {
      {R(0), R(0)}, {R(0), R(1)}, {R(1), R(0)}, {R(1), R(1)}};
  for (const R a0 : {R(0), R(1)})
    if (q.c11 != R(0)) {
      R a1 = -(q.c1 + q.c01 * a0) / (R(2) * q.c11);
      if (in_unit(a1)) cand.push_back({a0, a1});
    }
  for (const R a1 : {R(0), R(1)})
    if (q.c00 != R(0)) {
      R a0 = -(q.c0 + q.c01 * a1) / (R(2) * q.c00);
      if (in_unit(a0)) cand.push_back({a0, a1});
    }
  R det = R(4) * q.c00 * q.c11 - q.c01 * q.c01;
  if (det != R(0)) {
    R a0 = (q.c01 * q.c1 - R(2) * q.c11 * q.c0) / det;
    R a1 = (q.c01 * q.c0 - R(2) * q.c00 * q.c1) / det;
    if (in_unit(a0) && in_unit(a1)) cand.push_back({a0, a1});
  }
  auto best = cand.front();
  R best_v = q.at(best.first, best.second);
  for (const auto& c : cand) {
    R v = q.at(c.first, c.second);
    if (v > best_v) {
      best_v = v;
      best = c;
    }
  }
  return {best_v, best};
}

double to_d(const R& v) { return boost::rational_cast<double>(v); }

}  // namespace

CbitOptimum omega_cbit_exact() {
  CbitOptimum out;
  out.value = R(-1);
  for (int s0 = 0; s0 <= 1; ++s0)
    for (int s1 = 0; s1 <= 1; ++s1)
      for (int b0 = 0; b0 <= 1; ++b0)
        for (int b1 = 0; b1 <= 1; ++b1) {
          Quad q{R(-s0), R(-s1), R(s1), R(1) - R(1 - s0) * R(b0),
                 R(1) + R(1 - s1) * (R(b0) - R(b1))};
          auto [v, a] = quad_max(q);
          if (v > out.value) {
            out.value = v;
            out.a0 = a.first;
            out.a1 = a.second;
            out.s0 = R(s0);
            out.s1 = R(s1);
            out.b0 = R(b0);
            out.b1 = R(b1);
          }
        }

  SMachineSpec s;
  s.theory = Theory::cbit;
  s.cone = NormCone{1, NormKind::euclidean};
  s.omega = GptState{Vec::Constant(1, 1.0)};  // the distribution (1, 0)
  auto eff = [](const R& hi, const R& lo) {
    return GptEffect{to_d((hi + lo) / R(2)), Vec::Constant(1, to_d((hi - lo) / R(2)))};
  };
  s.f00 = eff(out.a0, out.b0);
  s.f11 = eff(out.a1, out.b1);
  s.sigma00 = GptState{Vec::Constant(1, 2.0 * to_d(out.s0) - 1.0)};
  s.sigma11 = GptState{Vec::Constant(1, 2.0 * to_d(out.s1) - 1.0)};
  out.spec = s;
  return out;
}

// ---------------------------------------------------------------------------
// qubit

namespace {

double qubit_objective(const Vec& p) {
  const Eigen::Matrix2d E00 = sym2(p(0), p(1), p(2));
  const Eigen::Matrix2d E11 = sym2(p(3), p(4), p(5));
  const Eigen::Vector2d psi0(p(6), p(7)), psi1(p(8), p(9));
  double s0 = psi0.dot(E00 * psi0) / psi0.squaredNorm();
  double s1 = psi1.dot((E00 - E11) * psi1) / psi1.squaredNorm();
  return p(0) * (1.0 - s0) + p(3) * (1.0 + s1);
}

void clip_effect_entries(double& a, double& b, double& c) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(sym2(a, b, c));
  Eigen::Vector2d ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
  Eigen::Matrix2d f =
      es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  a = f(0, 0);
  b = 0.5 * (f(0, 1) + f(1, 0));
  c = f(1, 1);
}

Vec qubit_project(Vec p) {
  clip_effect_entries(p(0), p(1), p(2));
  clip_effect_entries(p(3), p(4), p(5));
  for (int base : {6, 8}) {
    double nn = std::hypot(p(base), p(base + 1));
    if (nn < 1e-12) {
      p(base) = 1.0;
      p(base + 1) = 0.0;
    } else {
      p(base) /= nn;
      p(base + 1) /= nn;
    }
  }
  return p;
}

Vec qubit_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0), u11(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec p(10);
  for (int base : {0, 3})
    for (;;) {
      p(base) = u01(rng);
      p(base + 1) = u11(rng);
      p(base + 2) = u01(rng);
      double mid = 0.5 * (p(base) + p(base + 2));
      double rad = std::hypot(0.5 * (p(base) - p(base + 2)), p(base + 1));
      if (mid - rad >= 0.0 && mid + rad <= 1.0) break;
    }
  for (int i = 6; i < 10; ++i) p(i) = gauss(rng);
  return qubit_project(std::move(p));
}

}  // namespace

OptimizationResult optimize_qubit(int restarts, std::uint64_t seed,
                                  const AscentOptions& opts) {
  if (restarts < 1) throw std::invalid_argument("optimize_qubit: restarts >= 1");
  Vec first(10);
  first << 0.5, 0.0, 0.5, 0.5, 0.0, 0.5, 1.0, 0.0, 1.0, 0.0;
  // the parameter vector stores each symmetric effect by its upper triangle,
  // so finite differences see the off-diagonal entry twice; halving those
  // components makes the applied direction the matrix-space gradient
  Vec metric(10);
  metric << 1.0, 0.5, 1.0, 1.0, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0;
  OptimizationResult res = multistart(qubit_objective, qubit_project, qubit_draw,
                                      restarts, seed, opts, &first, &metric);
  if (!qubit_spec_from_parameters(res.parameters).valid())
    throw std::logic_error("optimize_qubit: infeasible optimizer output");
  return res;
}

SMachineSpec qubit_spec_from_parameters(const Vec& p) {
  if (p.size() != 10)
    throw std::invalid_argument("qubit parameters: expected 10 entries");
  auto pure_bloch = [](double u, double v) {
    double nn = std::hypot(u, v);
    u /= nn;
    v /= nn;
    Vec w(3);
    w << 2.0 * u * v, 0.0, u * u - v * v;
    return GptState{w};
  };
  SMachineSpec s;
  s.theory = Theory::qubit;
  s.cone = NormCone{3, NormKind::euclidean};
  Vec z(3);
  z << 0.0, 0.0, 1.0;
  s.omega = GptState{z};  // |0>
  s.f00 = bloch_effect(sym2(p(0), p(1), p(2)).cast<std::complex<double>>());
  s.f11 = bloch_effect(sym2(p(3), p(4), p(5)).cast<std::complex<double>>());
  s.sigma00 = pure_bloch(p(6), p(7));
  s.sigma11 = pure_bloch(p(8), p(9));
  return s;
}

Vec qubit_reference_parameters() {
  Vec p(10);
  p << 0.83346393, 0.37256115, 0.16653607, 0.94348494, -0.23091365, 0.05651506,
      0.40808831, -0.91294246, 0.64056375, 0.76790499;
  return p;
}

// ---------------------------------------------------------------------------
// norm cones

namespace {

// p = [w (n), t0, x0 (n), t1, x1 (n)]
double cone_objective(const NormCone& cone, const Vec& p) {
  const int n = cone.n;
  const auto w = p.segment(0, n);
  const double t0 = p(n), t1 = p(2 * n + 1);
  const auto x0 = p.segment(n + 1, n);
  const auto x1 = p.segment(2 * n + 2, n);
  return (t0 + w.dot(x0)) * (1.0 - t0 + norm(cone, x0)) +
         (t1 + w.dot(x1)) * (1.0 + t0 - t1 + norm(cone, Vec(x0 - x1)));
}

Vec cone_project(const NormCone& cone, Vec p) {
  const int n = cone.n;
  p.segment(0, n) = project_norm_ball(dual_kind(cone.kind), Vec(p.segment(0, n)), 1.0);
  for (int off : {n, 2 * n + 1}) {
    double t = p(off);
    Vec x = p.segment(off + 1, n);
    project_effect_params(cone, t, x);
    p(off) = t;
    p.segment(off + 1, n) = x;
  }
  return p;
}

Vec draw_state_vec(const NormCone& cone, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u11(-1.0, 1.0);
  const NormKind dual = dual_kind(cone.kind);
  Vec w(cone.n);
  for (int tries = 0; tries < 200000; ++tries) {
    for (int i = 0; i < cone.n; ++i) w(i) = u11(rng);
    if (dual_norm(cone, w) <= 1.0) return w;
  }
  return project_norm_ball(dual, w, 1.0);
}

GptEffect draw_effect_elem(const NormCone& cone, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0), u11(-1.0, 1.0);
  GptEffect f;
  f.x = Vec(cone.n);
  for (int tries = 0; tries < 200000; ++tries) {
    f.t = u01(rng);
    const double r = std::min(f.t, 1.0 - f.t);
    for (int i = 0; i < cone.n; ++i) f.x(i) = r * u11(rng);
    if (norm(cone, f.x) <= r) return f;
  }
  f.x = project_norm_ball(cone.kind, f.x, std::min(f.t, 1.0 - f.t));
  return f;
}

Vec cone_draw(const NormCone& cone, std::mt19937_64& rng) {
  const int n = cone.n;
  Vec p(3 * n + 2);
  p.segment(0, n) = draw_state_vec(cone, rng);
  for (int off : {n, 2 * n + 1}) {
    GptEffect f = draw_effect_elem(cone, rng);
    p(off) = f.t;
    p.segment(off + 1, n) = f.x;
  }
  return p;
}

// w with dual_norm(w) <= 1 and w.v = norm(v); zero stays zero
Vec achieving_state(const NormCone& cone, const Vec& v) {
  Vec w = Vec::Zero(cone.n);
  switch (cone.kind) {
    case NormKind::euclidean: {
      double nn = v.norm();
      if (nn > 0.0) w = v / nn;
      break;
    }
    case NormKind::manhattan:
      for (int i = 0; i < cone.n; ++i)
        w(i) = v(i) > 0.0 ? 1.0 : (v(i) < 0.0 ? -1.0 : 0.0);
      break;
    case NormKind::supremum: {
      Eigen::Index j = 0;
      if (v.cwiseAbs().maxCoeff(&j) > 0.0) w(j) = v(j) > 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  return w;
}

}  // namespace

OptimizationResult optimize_norm_cone(const NormCone& cone, int restarts,
                                      std::uint64_t seed,
                                      const AscentOptions& opts) {
  if (restarts < 1)
    throw std::invalid_argument("optimize_norm_cone: restarts >= 1");
  if (cone.n < 1) throw std::invalid_argument("optimize_norm_cone: n >= 1");
  auto f = [&cone](const Vec& p) { return cone_objective(cone, p); };
  auto proj = [&cone](const Vec& p) { return cone_project(cone, p); };
  auto draw = [&cone](std::mt19937_64& rng) { return cone_draw(cone, rng); };
  OptimizationResult res = multistart(f, proj, draw, restarts, seed, opts);
  if (!cone_spec_from_parameters(cone, res.parameters).valid())
    throw std::logic_error("optimize_norm_cone: infeasible optimizer output");
  return res;
}

SMachineSpec cone_spec_from_parameters(const NormCone& cone, const Vec& p,
                                       Theory theory) {
  const int n = cone.n;
  if (p.size() != 3 * n + 2)
    throw std::invalid_argument("cone parameters: expected 3n+2 entries");
  SMachineSpec s;
  s.theory = theory;
  s.cone = cone;
  s.omega = GptState{Vec(p.segment(0, n))};
  s.f00 = GptEffect{p(n), Vec(p.segment(n + 1, n))};
  s.f11 = GptEffect{p(2 * n + 1), Vec(p.segment(2 * n + 2, n))};
  // sigma00 minimizes sigma(f00), sigma11 maximizes sigma(f00 - f11)
  s.sigma00 = GptState{Vec(-achieving_state(cone, s.f00.x))};
  s.sigma11 = GptState{achieving_state(cone, Vec(s.f00.x - s.f11.x))};
  return s;
}

SMachineSpec gbit_construction() {
  SMachineSpec s;
  s.theory = Theory::gbit;
  s.cone = NormCone{2, NormKind::manhattan};
  Vec w(2), w0(2), w1(2), x0(2), x1(2);
  w << 1.0, -1.0;
  w0 << -1.0, 1.0;
  w1 << 1.0, 1.0;
  x0 << 0.5, 0.0;
  x1 << 0.0, -0.5;
  s.omega = GptState{w};
  s.sigma00 = GptState{w0};
  s.sigma11 = GptState{w1};
  s.f00 = GptEffect{0.5, x0};
  s.f11 = GptEffect{0.5, x1};
  return s;
}

bool hbit_gap_check(int n, int restarts, std::uint64_t seed, double epsilon) {
  OptimizationResult res =
      optimize_norm_cone(NormCone{n, NormKind::euclidean}, restarts, seed);
  return res.best_value <= 3.0 - epsilon;
}

SMachineSpec random_spec(const NormCone& cone, Theory theory,
                         std::mt19937_64& rng) {
  SMachineSpec s;
  s.theory = theory;
  s.cone = cone;
  s.omega = GptState{draw_state_vec(cone, rng)};
  s.sigma00 = GptState{draw_state_vec(cone, rng)};
  s.sigma11 = GptState{draw_state_vec(cone, rng)};
  s.f00 = draw_effect_elem(cone, rng);
  s.f11 = draw_effect_elem(cone, rng);
  return s;
}

}  // namespace tcorr
