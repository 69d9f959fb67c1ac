#pragma once

#include "tcorr/quantum.hpp"
#include "tcorr/sequences.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace tcorr {

// Inputs grouped into contexts; admissible sequences draw all their inputs
// from a single context.
struct ContextStructure {
  int n_inputs = 0;
  std::vector<std::vector<int>> contexts;
};

// Join contexts that share an input until all are mutually disjoint; inputs
// belonging to no context are dropped.
ContextStructure merge_contexts(const ContextStructure& ctx);

struct CheckViolation {
  Seq xs, as;
  double defect = 0.0;
};

struct CheckReport {
  bool pass = true;
  std::vector<CheckViolation> violations;
  double max_defect = 0.0;
};

// p(a.b | x.x_i) = p(a|x) delta_{b, a_i} for every admissible x of length
// < L, every position i, every output word.
CheckReport check_repeatability(const QuantumMachine& m,
                                const ContextStructure& ctx, int L,
                                double tol = 1e-10);

// p(a|x) = p(pi(a)|pi(x)) for every admissible x up to length L and every
// permutation pi.
CheckReport check_permutation_invariance(const QuantumMachine& m,
                                         const ContextStructure& ctx, int L,
                                         double tol = 1e-10);

// Decides whether each branch acts as X |-> |psi><psi| X |psi><psi| with
// <psi|psi> in {0,1}. Kraus-condition route: cross products K_i Q_j and
// Q_j K_i vanish for distinct outcomes, every branch is rank one and branches
// of one outcome are proportional, and the effective Kraus Q satisfies
// (Q^dag)^2 Q^2 = Q^dag Q. Returns the states (zero vector for an outcome
// that never fires) or nothing.
std::optional<std::vector<Eigen::Vector2cd>> is_projective_mnp(
    const KrausInstrument& inst, double tol = 1e-10);

// true iff every cross-input overlap magnitude is within tol of 0 or 1
bool overlap_dichotomy_check(
    const std::vector<std::vector<Eigen::Vector2cd>>& states_per_input,
    double tol = 1e-10);

// states reachable before an occurrence of input z, enumerated over
// admissible sequences of fewer than L steps with probability > tol
std::vector<CMat> reachable_prestates(const QuantumMachine& m,
                                      const ContextStructure& ctx, int z,
                                      int L, double tol = 1e-10);

// inputs that only ever produce one output within admissible sequences;
// eliminable without changing the verdict
std::vector<int> constant_output_inputs(const QuantumMachine& m,
                                        const ContextStructure& ctx, int L,
                                        double tol = 1e-10);

// inputs whose pre-measurement state is unique across all admissible
// occurrences (approximated by L-bounded reachability)
std::vector<int> fixed_prestate_inputs(const QuantumMachine& m,
                                       const ContextStructure& ctx, int L,
                                       double tol = 1e-10);

// One-state model p(a|x) = sum_b p_ref(b) prod_i f[b][x_i](a_i), valid on
// admissible sequences of the merged context containing the reference input.
struct NoncontextualModel {
  std::vector<int> context;  // sorted merged context
  int reference_input = 0;
  Eigen::VectorXd p_ref;  // outcome distribution of the reference input
  // f[b][k] is the 0/1 outcome indicator for the k-th context input
  std::vector<std::vector<Eigen::VectorXd>> f;
};

double model_prob(const NoncontextualModel& model, const Seq& xs, const Seq& as);

// Runs repeatability, permutation invariance, the projective
// measure-and-prepare decision per input, and the overlap dichotomy, then
// extracts relabeling coefficients relative to the reference input. Throws
// std::runtime_error naming the failing check.
NoncontextualModel build_noncontextual_model(const QuantumMachine& m,
                                             const ContextStructure& ctx,
                                             int reference_input, int L = 4,
                                             double tol = 1e-10);

}  // namespace tcorr
