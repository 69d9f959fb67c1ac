#pragma once

#include "tcorr/sequences.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace tcorr {

struct AotViolation {
  int prefix_len;
  std::size_t prefix_x, prefix_a;  // packed prefixes
  std::size_t suffix_x_a, suffix_x_b;
  double defect;
};

struct AotReport {
  bool pass = true;
  std::vector<AotViolation> violations;
  double max_defect = 0.0;
};

// Marginals of any output prefix must not depend on later inputs.
AotReport check_arrow_of_time(const CorrelationTable& t, double tol = 1e-10);

// Chain of step conditionals p(a_k | a_{<k}; x_{<=k}). Histories of zero
// probability carry an undefined flag; recomposition treats them as zero.
struct Decomposition {
  int n_inputs, n_outputs, length;
  // cond[k] indexed by (packed x_{1..k+1}, packed a_{1..k+1}); value of the
  // step-(k+1) conditional, NaN-free: defined[k] flags valid entries.
  std::vector<Eigen::MatrixXd> cond;
  std::vector<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> defined;
};

Decomposition decompose(const CorrelationTable& t, double tol = 1e-10);

CorrelationTable recompose(const Decomposition& d);

// All tables whose step conditionals are deterministic functions of the full
// history; count = prod_k n_out^((n_in*n_out)^(k-1) * n_in).
std::vector<CorrelationTable> enumerate_vertices(int L, int n_inputs,
                                                 int n_outputs, std::size_t cap);

// S = p(01|00) + p(10|10) + p(10|11) for binary length-2 tables.
double s_functional(const CorrelationTable& t);

}  // namespace tcorr
