#include "tcorr/classical.hpp"

#include <cmath>
#include <stdexcept>

namespace tcorr {

bool ClassicalMachine::valid(double tol) const {
  if (d < 1 || pi.size() != d) return false;
  if (static_cast<int>(T.size()) != n_inputs) return false;
  if (pi.minCoeff() < -tol || std::abs(pi.sum() - 1.0) > tol) return false;
  for (const auto& per_input : T) {
    if (static_cast<int>(per_input.size()) != n_outputs) return false;
    Eigen::VectorXd row_mass = Eigen::VectorXd::Zero(d);
    for (const auto& M : per_input) {
      if (M.rows() != d || M.cols() != d) return false;
      if (M.minCoeff() < -tol) return false;
      row_mass += M.rowwise().sum();
    }
    // sum_a sum_s' T(a|x)_{s,s'} = 1 for every current state s
    if ((row_mass.array() - 1.0).abs().maxCoeff() > tol) return false;
  }
  return true;
}

double sequence_prob(const ClassicalMachine& m, const Seq& xs, const Seq& as) {
  if (xs.size() != as.size()) throw std::invalid_argument("sequence length mismatch");
  Eigen::RowVectorXd v = m.pi.transpose();
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (xs[k] < 0 || xs[k] >= m.n_inputs) throw std::out_of_range("input symbol");
    if (as[k] < 0 || as[k] >= m.n_outputs) throw std::out_of_range("output symbol");
    v = v * m.T[xs[k]][as[k]];
  }
  return v.sum();  // times eta = ones
}

CorrelationTable machine_table(const ClassicalMachine& m, int L) {
  CorrelationTable t(m.n_inputs, m.n_outputs, L);
  for (std::size_t xi = 0; xi < t.num_input_seqs(); ++xi) {
    Seq xs = unpack(xi, m.n_inputs, L);
    for (std::size_t ai = 0; ai < t.num_output_seqs(); ++ai) {
      Seq as = unpack(ai, m.n_outputs, L);
      t.p(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(ai)) =
          sequence_prob(m, xs, as);
    }
  }
  return t;
}

CorrelationTable mixture_table(const MachineMixture& mix, int L) {
  if (mix.components.empty()) throw std::invalid_argument("empty mixture");
  const auto& first = mix.components.front().second;
  CorrelationTable acc(first.n_inputs, first.n_outputs, L);
  for (const auto& [w, m] : mix.components) {
    if (m.n_inputs != first.n_inputs || m.n_outputs != first.n_outputs)
      throw std::invalid_argument("mixture components with inconsistent alphabets");
    acc.p += w * machine_table(m, L).p;
  }
  return acc;
}

std::vector<ClassicalMachine> enumerate_deterministic(int d, int n_inputs,
                                                      int n_outputs,
                                                      std::size_t cap) {
  if (d < 1 || n_inputs < 1 || n_outputs < 1)
    throw std::invalid_argument("enumerate_deterministic: arguments >= 1");
  const std::size_t cells = static_cast<std::size_t>(d) * n_inputs;
  const std::size_t codes = static_cast<std::size_t>(n_outputs) * d;
  std::size_t total = d;
  for (std::size_t c = 0; c < cells; ++c) {
    if (total > cap / codes + 1) throw std::length_error("enumeration cap exceeded");
    total *= codes;
  }
  if (total > cap) throw std::length_error("enumeration cap exceeded");

  std::vector<ClassicalMachine> out;
  out.reserve(total);
  std::vector<std::size_t> assign(cells, 0);  // per (s, x): code = a*d + s'
  for (int init = 0; init < d; ++init) {
    std::fill(assign.begin(), assign.end(), 0);
    while (true) {
      ClassicalMachine m;
      m.d = d;
      m.n_inputs = n_inputs;
      m.n_outputs = n_outputs;
      m.pi = Eigen::VectorXd::Zero(d);
      m.pi(init) = 1.0;
      m.T.assign(n_inputs, std::vector<Eigen::MatrixXd>(
                               n_outputs, Eigen::MatrixXd::Zero(d, d)));
      for (int s = 0; s < d; ++s)
        for (int x = 0; x < n_inputs; ++x) {
          std::size_t code = assign[static_cast<std::size_t>(s) * n_inputs + x];
          int a = static_cast<int>(code / d);
          int sp = static_cast<int>(code % d);
          m.T[x][a](s, sp) = 1.0;
        }
      out.push_back(std::move(m));
      // odometer over assignments
      std::size_t c = 0;
      for (; c < cells; ++c) {
        if (++assign[c] < codes) break;
        assign[c] = 0;
      }
      if (c == cells) break;
    }
  }
  return out;
}

CorrelationTable eval_macrorealist(
    const std::vector<std::vector<std::vector<Eigen::VectorXd>>>& resp,
    const std::vector<double>& lambda_weights, int n_inputs, int n_outputs,
    int L) {
  if (resp.size() != lambda_weights.size())
    throw std::invalid_argument("weights/responses size mismatch");
  for (const auto& per_l : resp)
    for (const auto& per_step : per_l)
      for (const auto& dist : per_step)
        if (std::abs(dist.sum() - 1.0) > 1e-12 || dist.minCoeff() < -1e-12)
          throw std::invalid_argument("unnormalized response distribution");

  CorrelationTable t(n_inputs, n_outputs, L);
  for (std::size_t xi = 0; xi < t.num_input_seqs(); ++xi) {
    Seq xs = unpack(xi, n_inputs, L);
    for (std::size_t ai = 0; ai < t.num_output_seqs(); ++ai) {
      Seq as = unpack(ai, n_outputs, L);
      double p = 0.0;
      for (std::size_t l = 0; l < resp.size(); ++l) {
        double prod = lambda_weights[l];
        for (int k = 0; k < L; ++k) prod *= resp[l][k][xs[k]](as[k]);
        p += prod;
      }
      t.p(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(ai)) = p;
    }
  }
  return t;
}

}  // namespace tcorr
