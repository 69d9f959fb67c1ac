#include "tcorr/norm_cone.hpp"
#include "tcorr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace tcorr {

NormKind dual_kind(NormKind k) {
  switch (k) {
    case NormKind::euclidean: return NormKind::euclidean;
    case NormKind::manhattan: return NormKind::supremum;
    case NormKind::supremum:  return NormKind::manhattan;
  }
  throw std::logic_error("unknown norm kind");
}

static double norm_impl(NormKind k, const Vec& v) {
  switch (k) {
    case NormKind::euclidean: return v.norm();
    case NormKind::manhattan: return v.lpNorm<1>();
    case NormKind::supremum:  return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0;
  }
  throw std::logic_error("unknown norm kind");
}

double norm(const NormCone& cone, const Vec& v) {
  if (v.size() != cone.n) throw std::invalid_argument("norm: dimension mismatch");
  return norm_impl(cone.kind, v);
}

double dual_norm(const NormCone& cone, const Vec& v) {
  if (v.size() != cone.n) throw std::invalid_argument("dual_norm: dimension mismatch");
  return norm_impl(dual_kind(cone.kind), v);
}

double evaluate(const NormCone& cone, const GptState& omega, const GptEffect& f) {
  if (omega.w.size() != cone.n || f.x.size() != cone.n)
    throw std::invalid_argument("evaluate: dimension mismatch");
  return f.t + omega.w.dot(f.x);
}

bool is_valid_effect(const NormCone& cone, const GptEffect& f, double tol) {
  if (f.x.size() != cone.n) throw std::invalid_argument("is_valid_effect: dimension mismatch");
  return norm(cone, f.x) <= std::min(f.t, 1.0 - f.t) + tol;
}

bool is_valid_state(const NormCone& cone, const GptState& omega, double tol) {
  if (omega.w.size() != cone.n) throw std::invalid_argument("is_valid_state: dimension mismatch");
  return dual_norm(cone, omega.w) <= 1.0 + tol;
}

GptEffect unit_effect(int n) { return GptEffect{1.0, Vec::Zero(n)}; }

bool check_capacity_witness(const NormCone& cone, const CapacityWitness& w, double tol) {
  const std::size_t d = w.states.size();
  if (w.effects.size() != d) return false;
  for (const auto& s : w.states)
    if (!is_valid_state(cone, s, tol)) return false;
  for (const auto& f : w.effects)
    if (!is_valid_effect(cone, f, tol)) return false;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double target = (i == j) ? 1.0 : 0.0;
      if (std::abs(evaluate(cone, w.states[i], w.effects[j]) - target) > tol) return false;
    }
  // subunit condition: residual (1 - sum t_k, -sum x_k) lies in the positive cone
  double ts = 0.0;
  Vec xs = Vec::Zero(cone.n);
  for (const auto& f : w.effects) { ts += f.t; xs += f.x; }
  return norm_impl(cone.kind, xs) <= 1.0 - ts + tol;
}

CapacityWitness canonical_capacity_pair(const NormCone& cone) {
  // x with norm(x)=1, w with dual_norm(w)=1 and w.x = 1; e1 works for l2/l1,
  // the all-ones vector is the sup-norm unit with <w,e1>=1 for the l-inf cone.
  Vec x = Vec::Zero(cone.n);
  x(0) = 1.0;
  Vec w;
  switch (cone.kind) {
    case NormKind::euclidean: w = x; break;
    case NormKind::manhattan: w = x; break;  // ||e1||_inf = 1
    case NormKind::supremum:  w = x; break;  // ||e1||_1 = 1, ||e1||_inf = 1
  }
  CapacityWitness out;
  out.states = {GptState{w}, GptState{-w}};
  out.effects = {GptEffect{0.5, 0.5 * x}, GptEffect{0.5, -0.5 * x}};
  return out;
}

// --- ball projections ---

static Vec l1_ball_project(const Vec& v, double r) {
  if (r <= 0.0) return Vec::Zero(v.size());
  if (v.lpNorm<1>() <= r) return v;
  // Duchi et al. simplex-style thresholding
  std::vector<double> u(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) u[i] = std::abs(v(i));
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    css += u[k];
    double cand = (css - r) / static_cast<double>(k + 1);
    if (u[k] > cand) { rho = static_cast<int>(k + 1); theta = cand; }
  }
  (void)rho;
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double m = std::abs(v(i)) - theta;
    out(i) = m > 0.0 ? (v(i) > 0 ? m : -m) : 0.0;
  }
  // When r is below the rounding granularity of the prefix sums the
  // threshold condition can fail for every k, leaving out = v; rescaling
  // restores feasibility in all such borderline cases.
  double s = out.lpNorm<1>();
  if (s > r) out *= r / s;
  return out;
}

Vec project_norm_ball(NormKind kind, const Vec& v, double r) {
  switch (kind) {
    case NormKind::euclidean: {
      double n2 = v.norm();
      return n2 <= r ? v : Vec((r / n2) * v);
    }
    case NormKind::manhattan: return l1_ball_project(v, r);
    case NormKind::supremum:  return v.cwiseMax(-r).cwiseMin(r);
  }
  throw std::logic_error("unknown norm kind");
}

void project_effect_params(const NormCone& cone, double& t, Vec& x) {
  double tc = std::clamp(t, 0.0, 1.0);
  if (norm_impl(cone.kind, x) <= std::min(tc, 1.0 - tc)) { t = tc; return; }
  // feasible radii rho in [0, 1/2]; cost is convex in rho, ternary search
  auto cost = [&](double rho, double& tq, Vec& xq) {
    tq = std::clamp(t, rho, 1.0 - rho);
    xq = project_norm_ball(cone.kind, x, rho);
    return (tq - t) * (tq - t) + (xq - x).squaredNorm();
  };
  double lo = 0.0, hi = 0.5;
  double tq; Vec xq;
  for (int i = 0; i < 120; ++i) {
    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    double c1 = cost(m1, tq, xq), c2 = cost(m2, tq, xq);
    if (c1 <= c2) hi = m2; else lo = m1;
  }
  cost(0.5 * (lo + hi), tq, xq);
  t = tq;
  x = xq;
}

// --- capacity search ---

namespace {

struct CapacityProblem {
  NormCone cone;
  int d;
  // layout: d state vectors (n each), then d effects (1+n each)
  int dim() const { return d * cone.n + d * (1 + cone.n); }

  void unpack(const Eigen::VectorXd& p, std::vector<GptState>& ws,
              std::vector<GptEffect>& fs) const {
    ws.resize(d);
    fs.resize(d);
    int off = 0;
    for (int i = 0; i < d; ++i, off += cone.n) ws[i].w = p.segment(off, cone.n);
    for (int i = 0; i < d; ++i, off += 1 + cone.n) {
      fs[i].t = p(off);
      fs[i].x = p.segment(off + 1, cone.n);
    }
  }

  double penalty(const Eigen::VectorXd& p) const {
    std::vector<GptState> ws;
    std::vector<GptEffect> fs;
    unpack(p, ws, fs);
    double pen = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double v = evaluate(cone, ws[i], fs[j]) - (i == j ? 1.0 : 0.0);
        pen += v * v;
      }
    double ts = 0.0;
    Vec xs = Vec::Zero(cone.n);
    for (const auto& f : fs) { ts += f.t; xs += f.x; }
    double resid = norm(cone, xs) - (1.0 - ts);
    if (resid > 0.0) pen += resid * resid;
    return pen;
  }

  Eigen::VectorXd project(const Eigen::VectorXd& p) const {
    Eigen::VectorXd q = p;
    int off = 0;
    NormKind dk = dual_kind(cone.kind);
    for (int i = 0; i < d; ++i, off += cone.n)
      q.segment(off, cone.n) = project_norm_ball(dk, Vec(q.segment(off, cone.n)), 1.0);
    for (int i = 0; i < d; ++i, off += 1 + cone.n) {
      double t = q(off);
      Vec x = q.segment(off + 1, cone.n);
      project_effect_params(cone, t, x);
      q(off) = t;
      q.segment(off + 1, cone.n) = x;
    }
    return q;
  }

  Eigen::VectorXd draw(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Eigen::VectorXd p(dim());
    int off = 0;
    NormKind dk = dual_kind(cone.kind);
    for (int i = 0; i < d; ++i, off += cone.n) {
      Vec w(cone.n);
      do {
        for (int k = 0; k < cone.n; ++k) w(k) = u(rng);
      } while (norm_impl(dk, w) > 1.0);
      p.segment(off, cone.n) = w;
    }
    for (int i = 0; i < d; ++i, off += 1 + cone.n) {
      double t;
      Vec x(cone.n);
      do {
        t = u01(rng);
        double r = std::min(t, 1.0 - t);
        for (int k = 0; k < cone.n; ++k) x(k) = r * u(rng);
      } while (norm_impl(cone.kind, x) > std::min(t, 1.0 - t));
      p(off) = t;
      p.segment(off + 1, cone.n) = x;
    }
    return p;
  }
};

// Norm subgradient, for the hinge term of the penalty.
Vec norm_subgradient(NormKind kind, const Vec& v) {
  Vec g = Vec::Zero(v.size());
  switch (kind) {
    case NormKind::euclidean: {
      double n2 = v.norm();
      if (n2 > 0.0) g = v / n2;
      return g;
    }
    case NormKind::manhattan:
      for (Eigen::Index i = 0; i < v.size(); ++i)
        g(i) = v(i) > 0.0 ? 1.0 : (v(i) < 0.0 ? -1.0 : 0.0);
      return g;
    case NormKind::supremum: {
      Eigen::Index j = 0;
      v.cwiseAbs().maxCoeff(&j);
      g(j) = v(j) >= 0.0 ? 1.0 : -1.0;
      return g;
    }
  }
  throw std::logic_error("unknown norm kind");
}

// Levenberg-Marquardt on an augmented least-squares system where validity
// enters through hinge residuals instead of hard projections. The optimum
// sits on the boundary (norms tight, sum of effects equal to the unit), so a
// projected method crawls along the curvature; unconstrained steps on the
// augmented system land on the boundary as a zero of the residuals. The
// descent phase parks in a shallow valley (linear rate); this closes the
// last few orders of magnitude.
void lm_polish(const CapacityProblem& prob, Eigen::VectorXd& p) {
  const NormCone& cone = prob.cone;
  const NormKind dk = dual_kind(cone.kind);
  const int d = prob.d, n = cone.n, dim = prob.dim();
  // rows: d*d pairings, sum hinge, d state hinges, 2d effect hinges
  const int m = d * d + 1 + 3 * d;
  std::vector<GptState> ws;
  std::vector<GptEffect> fs;

  Eigen::VectorXd r(m);
  Eigen::MatrixXd J(m, dim);
  auto residuals = [&](const Eigen::VectorXd& q, Eigen::VectorXd& rr,
                       Eigen::MatrixXd* JJ) {
    prob.unpack(q, ws, fs);
    rr.setZero(m);
    if (JJ) JJ->setZero(m, dim);
    int row = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j, ++row) {
        rr(row) = evaluate(cone, ws[i], fs[j]) - (i == j ? 1.0 : 0.0);
        if (!JJ) continue;
        JJ->block(row, i * n, 1, n) = fs[j].x.transpose();
        int off = d * n + j * (1 + n);
        (*JJ)(row, off) = 1.0;
        JJ->block(row, off + 1, 1, n) = ws[i].w.transpose();
      }
    double ts = 0.0;
    Vec xs = Vec::Zero(n);
    for (const auto& f : fs) { ts += f.t; xs += f.x; }
    if (double h = norm_impl(cone.kind, xs) - (1.0 - ts); h > 0.0) {
      rr(row) = h;
      if (JJ) {
        Vec gx = norm_subgradient(cone.kind, xs);
        for (int j = 0; j < d; ++j) {
          int off = d * n + j * (1 + n);
          (*JJ)(row, off) = 1.0;
          JJ->block(row, off + 1, 1, n) = gx.transpose();
        }
      }
    }
    ++row;
    for (int i = 0; i < d; ++i, ++row) {
      if (double h = norm_impl(dk, ws[i].w) - 1.0; h > 0.0) {
        rr(row) = h;
        if (JJ)
          JJ->block(row, i * n, 1, n) =
              norm_subgradient(dk, ws[i].w).transpose();
      }
    }
    for (int j = 0; j < d; ++j, row += 2) {
      int off = d * n + j * (1 + n);
      double nx = norm_impl(cone.kind, fs[j].x);
      Vec gx = norm_subgradient(cone.kind, fs[j].x);
      if (double h = nx - fs[j].t; h > 0.0) {
        rr(row) = h;
        if (JJ) {
          (*JJ)(row, off) = -1.0;
          JJ->block(row, off + 1, 1, n) = gx.transpose();
        }
      }
      if (double h = nx - (1.0 - fs[j].t); h > 0.0) {
        rr(row + 1) = h;
        if (JJ) {
          (*JJ)(row + 1, off) = 1.0;
          JJ->block(row + 1, off + 1, 1, n) = gx.transpose();
        }
      }
    }
  };

  residuals(p, r, &J);
  double pen = r.squaredNorm();
  double lambda = 1e-8;
  Eigen::VectorXd rq(m);
  for (int iter = 0; iter < 200 && pen > 1e-24; ++iter) {
    Eigen::MatrixXd A = J.transpose() * J;
    Eigen::VectorXd b = -J.transpose() * r;
    bool stepped = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd Ad = A;
      Ad.diagonal().array() += lambda;
      Eigen::VectorXd q = p + Ad.ldlt().solve(b);
      residuals(q, rq, nullptr);
      double pq = rq.squaredNorm();
      if (pq < pen) {
        p = std::move(q);
        pen = pq;
        lambda = std::max(lambda * 0.25, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) break;
    residuals(p, r, &J);
  }
}

}  // namespace

CapacitySearchOutcome search_capacity(const NormCone& cone, int d, int restarts,
                                      std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("search_capacity: d >= 1 required");
  CapacityProblem prob{cone, d};
  AscentOptions opts;
  opts.minimize = true;
  opts.max_iters = 300;   // coarse basin finding; lm_polish finishes the job
  auto penalty = [&](const Eigen::VectorXd& p) { return prob.penalty(p); };
  auto proj = [&](const Eigen::VectorXd& p) { return prob.project(p); };

  CapacitySearchOutcome out;
  out.best_penalty = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    auto rng = restart_rng(seed, r);
    Eigen::VectorXd p = prob.draw(rng);
    projected_ascent(penalty, proj, p, opts);
    lm_polish(prob, p);
    p = prob.project(p);   // restore exact feasibility after the polish
    double pen = prob.penalty(p);
    out.best_penalty = std::min(out.best_penalty, pen);
    if (pen <= 1e-9) {
      CapacityWitness w;
      prob.unpack(p, w.states, w.effects);
      out.witness = std::move(w);
      break;
    }
  }
  return out;
}

}  // namespace tcorr
