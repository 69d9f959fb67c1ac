#pragma once

#include "tcorr/sequences.hpp"

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace tcorr {

// Finite-state machine with d internal states. T[x][a] is the d x d matrix
// with entry (s, s') = q(a, s' | s, x); rows index the current state, products
// run left to right from the initial row vector pi.
struct ClassicalMachine {
  int d = 1;
  int n_inputs = 2;
  int n_outputs = 2;
  Eigen::VectorXd pi;
  std::vector<std::vector<Eigen::MatrixXd>> T;  // [x][a]

  bool valid(double tol = 1e-12) const;
};

double sequence_prob(const ClassicalMachine& m, const Seq& xs, const Seq& as);

CorrelationTable machine_table(const ClassicalMachine& m, int L);

struct MachineMixture {
  std::vector<std::pair<double, ClassicalMachine>> components;
};

CorrelationTable mixture_table(const MachineMixture& mix, int L);

// Every machine with a deterministic transition function (s, x) -> (a, s')
// and a basis-vector initial state. Count: (n_outputs*d)^(d*n_inputs) * d.
std::vector<ClassicalMachine> enumerate_deterministic(int d, int n_inputs,
                                                      int n_outputs,
                                                      std::size_t cap);

// Product-form correlations: p(as|xs) = sum_l w_l prod_k resp[l][k][x](a).
// resp[l][k][x] is the output distribution of variable l at step k, input x.
CorrelationTable eval_macrorealist(
    const std::vector<std::vector<std::vector<Eigen::VectorXd>>>& resp,
    const std::vector<double>& lambda_weights, int n_inputs, int n_outputs,
    int L);

}  // namespace tcorr
