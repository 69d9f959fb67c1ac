#pragma once

#include "tcorr/classical.hpp"
#include "tcorr/gpt_machine.hpp"
#include "tcorr/norm_cone.hpp"
#include "tcorr/optimize.hpp"
#include "tcorr/quantum.hpp"

#include <boost/rational.hpp>
#include <cstdint>
#include <random>

namespace tcorr {

using Rational = boost::rational<long long>;

enum class Theory { cbit, qubit, hbit, gbit, norm_cone };

// Measure-and-prepare data entering the two-step functional
//   S = omega(f00)[1 - sigma00(f00)] + omega(f11)[1 + sigma11(f00 - f11)].
// Every theory is carried in cone coordinates: cbit on the n=1 interval,
// qubit on the euclidean n=3 ball (Bloch picture), hbit on euclidean n,
// gbit on manhattan n=2.
struct SMachineSpec {
  Theory theory = Theory::norm_cone;
  NormCone cone;
  GptState omega;
  GptEffect f00, f11;
  GptState sigma00, sigma11;

  bool valid(double tol = 1e-9) const;
};

double eval_S(const SMachineSpec& spec);

// Full 2-input 2-output machine. Branches that never enter S are completed
// with the complement effect and the maximally mixed prepared state; S does
// not depend on that choice.
GptMachine build_machine(const SMachineSpec& spec);
ClassicalMachine build_classical(const SMachineSpec& spec);  // cbit only
QuantumMachine build_quantum(const SMachineSpec& spec);      // qubit only

// ---------------------------------------------------------------------------
// classical case, solved exactly
//
// With omega = (1,0), f_{i|i} = (a_i, b_i), sigma_{i|i} = (s_i, 1-s_i) the
// functional is linear in each of s0, s1, b0, b1, so those sit at vertices of
// the cube; what is left is a bivariate quadratic in (a0, a1) over [0,1]^2,
// solved in closed form with rational arithmetic.
struct CbitOptimum {
  Rational value;  // 9/4
  Rational a0, a1, b0, b1, s0, s1;
  SMachineSpec spec;
};

CbitOptimum omega_cbit_exact();

// ---------------------------------------------------------------------------
// qubit lower bound
//
// Ten real parameters: symmetric effects E00 = [[p0,p1],[p1,p2]],
// E11 = [[p3,p4],[p4,p5]] and real prepared states psi0 = (p6,p7),
// psi1 = (p8,p9); the initial state is fixed to |0>.  Projection clips
// effect eigenvalues to [0,1] and normalizes the states, so every reported
// value is feasible and hence a certified lower bound.
OptimizationResult optimize_qubit(int restarts, std::uint64_t seed,
                                  const AscentOptions& opts = {});

SMachineSpec qubit_spec_from_parameters(const Vec& p);

// Known near-optimal point with entries rounded to a few decimals; direct
// evaluation gives S = 2.35570321977 (the rounding leaves one effect
// eigenvalue a hair outside [0,1], so this is a consistency anchor, not a
// certified bound; the optimizer's projection restores feasibility).
Vec qubit_reference_parameters();

// ---------------------------------------------------------------------------
// norm-cone lower bound
//
// Parameters p = [w (n), t0, x0 (n), t1, x1 (n)].  The prepared states are
// eliminated: the optimal sigma00 gives 1 - t0 + ||x0|| and the optimal
// sigma11 gives 1 + t0 - t1 + ||x0 - x1||, both reconstructed afterwards as
// norm-achieving functionals.
OptimizationResult optimize_norm_cone(const NormCone& cone, int restarts,
                                      std::uint64_t seed,
                                      const AscentOptions& opts = {});

SMachineSpec cone_spec_from_parameters(const NormCone& cone, const Vec& p,
                                       Theory theory = Theory::norm_cone);

// algebraic maximum on the square state space: w = (1,-1), w0 = (-1,1),
// w1 = (1,1), f00 = (1/2, (1/2, 0)), f11 = (1/2, (0, -1/2)); S = 3
SMachineSpec gbit_construction();

// hyperball state spaces stay strictly below the algebraic maximum:
// optimize_norm_cone on euclidean n, assert best <= 3 - epsilon
bool hbit_gap_check(int n, int restarts, std::uint64_t seed,
                    double epsilon = 0.6);

// valid spec with uniformly drawn cone elements, for consistency tests
SMachineSpec random_spec(const NormCone& cone, Theory theory,
                         std::mt19937_64& rng);

}  // namespace tcorr
