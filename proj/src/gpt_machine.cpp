#include "tcorr/gpt_machine.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace tcorr {

GptTransformation GptTransformation::identity(int n) {
  return {1.0, Vec::Zero(n), Vec::Zero(n), Eigen::MatrixXd::Identity(n, n)};
}

GptTransformation GptTransformation::zero(int n) {
  return {0.0, Vec::Zero(n), Vec::Zero(n), Eigen::MatrixXd::Zero(n, n)};
}

GptEffect apply(const GptTransformation& tr, const GptEffect& g) {
  if (tr.alpha.size() != g.x.size())
    throw std::invalid_argument("apply: dimension mismatch");
  return {tr.t * g.t + tr.alpha.dot(g.x), tr.f * g.t + tr.B * g.x};
}

bool GptMachine::probability_preserving(double tol) const {
  const GptEffect e = unit_effect(cone.n);
  for (const auto& inst : instruments) {
    double ts = 0.0;
    Vec xs = Vec::Zero(cone.n);
    for (const auto& tr : inst) {
      GptEffect img = apply(tr, e);
      ts += img.t;
      xs += img.x;
    }
    if (std::abs(ts - 1.0) > tol || xs.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

double sequence_prob(const GptMachine& m, const Seq& xs, const Seq& as) {
  if (xs.size() != as.size()) throw std::invalid_argument("sequence length mismatch");
  GptEffect g = unit_effect(m.cone.n);
  for (std::size_t k = xs.size(); k-- > 0;) {
    if (xs[k] < 0 || xs[k] >= m.n_inputs()) throw std::out_of_range("input symbol");
    if (as[k] < 0 || as[k] >= m.n_outputs()) throw std::out_of_range("output symbol");
    g = apply(m.instruments[xs[k]][as[k]], g);
  }
  return evaluate(m.cone, m.omega0, g);
}

CorrelationTable machine_table(const GptMachine& m, int L) {
  CorrelationTable t(m.n_inputs(), m.n_outputs(), L);
  for (std::size_t xi = 0; xi < t.num_input_seqs(); ++xi) {
    Seq xs = unpack(xi, t.n_inputs, L);
    for (std::size_t ai = 0; ai < t.num_output_seqs(); ++ai) {
      Seq as = unpack(ai, t.n_outputs, L);
      t.p(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(ai)) =
          sequence_prob(m, xs, as);
    }
  }
  return t;
}

GptTransformation mnp_transformation(const GptEffect& effect,
                                     const GptState& prepared) {
  // apply(g) = prepared(g) * effect: (s,y) |-> (s + w.y) * (t_f, x_f)
  GptTransformation tr;
  tr.t = effect.t;
  tr.alpha = effect.t * prepared.w;
  tr.f = effect.x;
  tr.B = effect.x * prepared.w.transpose();
  return tr;
}

static bool state_image_ok(const NormCone& cone, const GptTransformation& tr,
                           const Vec& w, double tol) {
  double denom = tr.t + w.dot(tr.f);
  double num = dual_norm(cone, Vec(tr.B.transpose() * w + tr.alpha));
  return num <= denom + tol;
}

bool validate_transformation(const NormCone& cone, const GptTransformation& tr,
                             ValidationMode mode, double tol, int samples,
                             std::uint64_t seed) {
  const int n = cone.n;
  if (mode == ValidationMode::exact) {
    // extreme points of the dual ball: sign vectors for the l1 primal (dual
    // l-inf), +-basis vectors for the l-inf primal (dual l1)
    if (cone.kind == NormKind::euclidean)
      throw std::invalid_argument("exact validation requires a polytopic cone");
    std::vector<Vec> duals;
    if (cone.kind == NormKind::manhattan) {
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        Vec w(n);
        for (int i = 0; i < n; ++i) w(i) = (mask >> i) & 1 ? 1.0 : -1.0;
        duals.push_back(w);
      }
    } else {
      for (int i = 0; i < n; ++i) {
        Vec w = Vec::Zero(n);
        w(i) = 1.0;
        duals.push_back(w);
        duals.push_back(-w);
      }
    }
    for (const auto& w : duals)
      if (!state_image_ok(cone, tr, w, tol)) return false;
    return true;
  }

  // sampled: +-basis grid plus random unit vectors; rejects only, never proves
  for (int i = 0; i < n; ++i) {
    Vec w = Vec::Zero(n);
    w(i) = 1.0;
    if (!state_image_ok(cone, tr, w, tol)) return false;
    if (!state_image_ok(cone, tr, Vec(-w), tol)) return false;
  }
  if (!state_image_ok(cone, tr, Vec::Zero(n), tol)) return false;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Vec w(n);
    for (int i = 0; i < n; ++i) w(i) = gauss(rng);
    double nn = w.norm();
    if (nn < 1e-12) continue;
    w /= nn;
    if (!state_image_ok(cone, tr, w, tol)) return false;
  }
  return true;
}

GptMachine classical_to_gpt(const ClassicalMachine& m) {
  if (m.d != 2)
    throw std::invalid_argument("classical_to_gpt: the n=1 cone embedding needs d=2");
  GptMachine g;
  g.cone = NormCone{1, NormKind::euclidean};
  g.omega0 = GptState{Vec::Constant(1, m.pi(0) - m.pi(1))};
  // classical effect components (f1,f2) <-> (t,x) via f1 = t+x, f2 = t-x;
  // transition matrices conjugated by that change of basis
  Eigen::Matrix2d C;
  C << 1, 1, 1, -1;
  Eigen::Matrix2d Cinv = 0.5 * C;
  for (int x = 0; x < m.n_inputs; ++x) {
    std::vector<GptTransformation> inst;
    for (int a = 0; a < m.n_outputs; ++a) {
      // effects transform by T acting on response vectors
      Eigen::Matrix2d M = Cinv * m.T[x][a] * C;
      GptTransformation tr;
      tr.t = M(0, 0);
      tr.alpha = Vec::Constant(1, M(0, 1));
      tr.f = Vec::Constant(1, M(1, 0));
      tr.B = Eigen::MatrixXd::Constant(1, 1, M(1, 1));
      inst.push_back(tr);
    }
    g.instruments.push_back(std::move(inst));
  }
  return g;
}

GptState bloch_state(const CMat& rho) {
  Vec r(3);
  r(0) = 2.0 * rho(1, 0).real();
  r(1) = 2.0 * rho(1, 0).imag();
  r(2) = (rho(0, 0) - rho(1, 1)).real();
  return GptState{r};
}

GptEffect bloch_effect(const CMat& E) {
  GptEffect f;
  f.t = 0.5 * E.trace().real();
  f.x = Vec(3);
  f.x(0) = E(1, 0).real();
  f.x(1) = E(1, 0).imag();
  f.x(2) = 0.5 * (E(0, 0) - E(1, 1)).real();
  return f;
}

CMat bloch_state_to_density(const GptState& s) {
  CMat rho(2, 2);
  const std::complex<double> i(0.0, 1.0);
  rho(0, 0) = 0.5 * (1.0 + s.w(2));
  rho(1, 1) = 0.5 * (1.0 - s.w(2));
  rho(0, 1) = 0.5 * (s.w(0) - i * s.w(1));
  rho(1, 0) = 0.5 * (s.w(0) + i * s.w(1));
  return rho;
}

CMat bloch_effect_to_matrix(const GptEffect& f) {
  CMat E(2, 2);
  const std::complex<double> i(0.0, 1.0);
  E(0, 0) = f.t + f.x(2);
  E(1, 1) = f.t - f.x(2);
  E(0, 1) = f.x(0) - i * f.x(1);
  E(1, 0) = f.x(0) + i * f.x(1);
  return E;
}

}  // namespace tcorr
