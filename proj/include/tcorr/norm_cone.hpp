#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace tcorr {

using Vec = Eigen::VectorXd;

enum class NormKind { euclidean, manhattan, supremum };

NormKind dual_kind(NormKind k);

// Dichotomic norm cone on R x R^n: (t, x) >= 0  iff  t >= ||x||.
struct NormCone {
  int n = 1;
  NormKind kind = NormKind::euclidean;
};

double norm(const NormCone& cone, const Vec& v);
double dual_norm(const NormCone& cone, const Vec& v);

// Effect f = (t, x) with norm(x) <= min(t, 1-t).
struct GptEffect {
  double t = 0.0;
  Vec x;
};

// State omega: (t, x) |-> t + w.x, with dual_norm(w) <= 1.
struct GptState {
  Vec w;
};

double evaluate(const NormCone& cone, const GptState& omega, const GptEffect& f);

bool is_valid_effect(const NormCone& cone, const GptEffect& f, double tol = 1e-12);
bool is_valid_state(const NormCone& cone, const GptState& omega, double tol = 1e-12);

GptEffect unit_effect(int n);  // the order unit e = (1, 0)

// d states and d effects with omega_i(f_j) = delta_ij and sum_k f_k <= e.
struct CapacityWitness {
  std::vector<GptState> states;
  std::vector<GptEffect> effects;
};

bool check_capacity_witness(const NormCone& cone, const CapacityWitness& w,
                            double tol = 1e-12);

// d=2 pair from aligned unit vectors: states +-w, effects (1, +-x)/2.
CapacityWitness canonical_capacity_pair(const NormCone& cone);

struct CapacitySearchOutcome {
  std::optional<CapacityWitness> witness;
  double best_penalty = 0.0;
};

// Penalty minimization over d states/effects; succeeds iff penalty <= 1e-9.
CapacitySearchOutcome search_capacity(const NormCone& cone, int d, int restarts,
                                      std::uint64_t seed);

// --- projections used by the optimizers (exact metric projections) ---

// Project v onto the primal-norm ball of radius r.
Vec project_norm_ball(NormKind kind, const Vec& v, double r);

// Metric projection of (t, x) onto {0 <= t <= 1, norm(x) <= min(t, 1-t)}.
void project_effect_params(const NormCone& cone, double& t, Vec& x);

}  // namespace tcorr
