#pragma once

#include "tcorr/sequences.hpp"

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace tcorr {

using CMat = Eigen::MatrixXcd;

bool is_density_matrix(const CMat& rho, double tol = 1e-12);
bool is_psd(const CMat& M, double tol = 1e-10);

// Heisenberg-picture instrument: I_a(X) = sum_j K_{a,j}^dag X K_{a,j},
// unital across outputs.
struct KrausInstrument {
  std::vector<std::vector<CMat>> kraus;  // [output][branch]

  int dim() const { return kraus.empty() || kraus[0].empty() ? 0 : static_cast<int>(kraus[0][0].rows()); }
  int n_outputs() const { return static_cast<int>(kraus.size()); }

  CMat apply(int a, const CMat& X) const;
  CMat effect(int a) const;  // I_a(identity)
  bool unital(double tol = 1e-10) const;
};

struct QuantumMachine {
  CMat rho0;
  std::vector<KrausInstrument> instruments;  // per input

  int dim() const { return static_cast<int>(rho0.rows()); }
  int n_inputs() const { return static_cast<int>(instruments.size()); }
};

// tr[rho0 I_{a1|x1}( ... I_{an|xn}(1) )], composed right to left.
double sequence_prob(const QuantumMachine& m, const Seq& xs, const Seq& as);

CorrelationTable machine_table(const QuantumMachine& m, int L);

// Instrument with Heisenberg action X |-> tr(sigma_a X) E_a, Kraus operators
// sqrt(s_i e_m) |u_i><v_m| from the eigendecompositions of E_a and sigma_a.
KrausInstrument measure_and_prepare(const std::vector<CMat>& effects,
                                    const std::vector<CMat>& states);

// Schroedinger-picture step: probability plus normalized post-state; the
// zero-probability branch returns the input state unchanged.
std::pair<double, CMat> state_update(const CMat& rho, const KrausInstrument& inst,
                                     int a);

// Schroedinger-picture sequence probability, consistency oracle for the
// Heisenberg evaluation.
double sequence_prob_schrodinger(const QuantumMachine& m, const Seq& xs,
                                 const Seq& as);

}  // namespace tcorr
