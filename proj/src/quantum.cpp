#include "tcorr/quantum.hpp"

#include <cmath>
#include <stdexcept>

namespace tcorr {

bool is_psd(const CMat& M, double tol) {
  if ((M - M.adjoint()).cwiseAbs().maxCoeff() > tol * 100) return false;
  Eigen::SelfAdjointEigenSolver<CMat> es(M);
  return es.eigenvalues().minCoeff() >= -tol;
}

bool is_density_matrix(const CMat& rho, double tol) {
  if (rho.rows() != rho.cols()) return false;
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rho.trace().real() - 1.0) > tol || std::abs(rho.trace().imag()) > tol)
    return false;
  Eigen::SelfAdjointEigenSolver<CMat> es(rho);
  return es.eigenvalues().minCoeff() >= -tol;
}

CMat KrausInstrument::apply(int a, const CMat& X) const {
  const int d = dim();
  CMat out = CMat::Zero(d, d);
  for (const CMat& K : kraus[a]) out += K.adjoint() * X * K;
  return out;
}

CMat KrausInstrument::effect(int a) const {
  return apply(a, CMat::Identity(dim(), dim()));
}

bool KrausInstrument::unital(double tol) const {
  const int d = dim();
  CMat sum = CMat::Zero(d, d);
  for (int a = 0; a < n_outputs(); ++a) sum += effect(a);
  return (sum - CMat::Identity(d, d)).cwiseAbs().maxCoeff() <= tol;
}

double sequence_prob(const QuantumMachine& m, const Seq& xs, const Seq& as) {
  if (xs.size() != as.size()) throw std::invalid_argument("sequence length mismatch");
  const int d = m.dim();
  CMat X = CMat::Identity(d, d);
  for (std::size_t k = xs.size(); k-- > 0;) {
    if (xs[k] < 0 || xs[k] >= m.n_inputs()) throw std::out_of_range("input symbol");
    const KrausInstrument& inst = m.instruments[xs[k]];
    if (as[k] < 0 || as[k] >= inst.n_outputs()) throw std::out_of_range("output symbol");
    X = inst.apply(as[k], X);
  }
  return (m.rho0 * X).trace().real();
}

CorrelationTable machine_table(const QuantumMachine& m, int L) {
  int n_out = m.instruments.empty() ? 0 : m.instruments[0].n_outputs();
  CorrelationTable t(m.n_inputs(), n_out, L);
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

KrausInstrument measure_and_prepare(const std::vector<CMat>& effects,
                                    const std::vector<CMat>& states) {
  if (effects.size() != states.size())
    throw std::invalid_argument("measure_and_prepare: size mismatch");
  if (effects.empty()) throw std::invalid_argument("measure_and_prepare: empty");
  const int d = static_cast<int>(effects[0].rows());
  CMat sum = CMat::Zero(d, d);
  for (const auto& E : effects) sum += E;
  if ((sum - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("effects do not sum to identity");
  for (const auto& s : states)
    if (!is_density_matrix(s, 1e-10))
      throw std::invalid_argument("invalid prepared state");

  KrausInstrument inst;
  for (std::size_t a = 0; a < effects.size(); ++a) {
    Eigen::SelfAdjointEigenSolver<CMat> ee(effects[a]);
    Eigen::SelfAdjointEigenSolver<CMat> se(states[a]);
    std::vector<CMat> branch;
    for (int i = 0; i < d; ++i) {
      double s = std::max(ee.eigenvalues()(i), 0.0);
      if (s < 1e-15) continue;
      for (int mth = 0; mth < d; ++mth) {
        double e = std::max(se.eigenvalues()(mth), 0.0);
        if (e < 1e-15) continue;
        // K = sqrt(s_i e_m) |v_m><u_i| gives sum K^dag X K = tr(sigma X) E
        branch.push_back(std::sqrt(s * e) * se.eigenvectors().col(mth) *
                         ee.eigenvectors().col(i).adjoint());
      }
    }
    if (branch.empty()) branch.push_back(CMat::Zero(d, d));
    inst.kraus.push_back(std::move(branch));
  }
  return inst;
}

std::pair<double, CMat> state_update(const CMat& rho, const KrausInstrument& inst,
                                     int a) {
  double p = (rho * inst.effect(a)).trace().real();
  if (p <= 0.0) return {0.0, rho};
  const int d = inst.dim();
  CMat post = CMat::Zero(d, d);
  for (const CMat& K : inst.kraus[a]) post += K * rho * K.adjoint();
  return {p, post / p};
}

double sequence_prob_schrodinger(const QuantumMachine& m, const Seq& xs,
                                 const Seq& as) {
  CMat rho = m.rho0;
  double p = 1.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    auto [pk, post] = state_update(rho, m.instruments[xs[k]], as[k]);
    p *= pk;
    if (p == 0.0) return 0.0;
    rho = post;
  }
  return p;
}

}  // namespace tcorr
