#pragma once

#include "tcorr/classical.hpp"
#include "tcorr/norm_cone.hpp"
#include "tcorr/quantum.hpp"
#include "tcorr/sequences.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace tcorr {

// Block form acting on effects (s, y) |-> (t*s + alpha.y, f*s + B*y).
struct GptTransformation {
  double t = 0.0;
  Vec alpha;
  Vec f;
  Eigen::MatrixXd B;

  static GptTransformation identity(int n);
  static GptTransformation zero(int n);
};

GptEffect apply(const GptTransformation& tr, const GptEffect& g);

struct GptMachine {
  NormCone cone;
  GptState omega0;
  std::vector<std::vector<GptTransformation>> instruments;  // [input][output]

  int n_inputs() const { return static_cast<int>(instruments.size()); }
  int n_outputs() const {
    return instruments.empty() ? 0 : static_cast<int>(instruments[0].size());
  }
  // sum_a I_{a|x}(e) = e for every input
  bool probability_preserving(double tol = 1e-12) const;
};

double sequence_prob(const GptMachine& m, const Seq& xs, const Seq& as);

CorrelationTable machine_table(const GptMachine& m, int L);

// Measure-and-prepare map g |-> prepared(g) * effect, i.e. t = t_f,
// alpha = t_f * w, f = x_f, B = x_f w^T.
GptTransformation mnp_transformation(const GptEffect& effect,
                                     const GptState& prepared);

enum class ValidationMode { exact, sampled };

// State-image positivity: dual_norm(B^T w + alpha) <= t + w.f for all
// states w. Exact over the extremal dual vectors for polytopic cones;
// sampled (grid plus seeded random unit sphere) for the euclidean cone.
bool validate_transformation(const NormCone& cone, const GptTransformation& tr,
                             ValidationMode mode, double tol = 1e-9,
                             int samples = 512, std::uint64_t seed = 1);

// d=2 classical machine on the n=1 cone (simplex coordinates t=(f1+f2)/2,
// x=(f1-f2)/2, w = p1-p2); test utility for the embedding property.
GptMachine classical_to_gpt(const ClassicalMachine& m);

// Qubit <-> euclidean n=3 correspondence: rho = (1 + r.sigma)/2,
// E = t*1 + x.sigma.
GptState bloch_state(const CMat& rho);
GptEffect bloch_effect(const CMat& E);
CMat bloch_state_to_density(const GptState& s);
CMat bloch_effect_to_matrix(const GptEffect& f);

}  // namespace tcorr
