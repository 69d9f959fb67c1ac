#include "tcorr/contextuality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tcorr {

namespace {

bool share_input(const std::vector<int>& a, const std::vector<int>& b) {
  for (int x : a)
    if (std::find(b.begin(), b.end(), x) != b.end()) return true;
  return false;
}

// all input words of the given length over a context
std::vector<Seq> context_words(const std::vector<int>& c, int len) {
  std::vector<Seq> out;
  Seq idx(len, 0);
  for (;;) {
    Seq xs(len);
    for (int k = 0; k < len; ++k) xs[k] = c[idx[k]];
    out.push_back(xs);
    int k = 0;
    for (; k < len; ++k) {
      if (++idx[k] < static_cast<int>(c.size())) break;
      idx[k] = 0;
    }
    if (k == len) break;
  }
  return out;
}

std::vector<Seq> output_words(int n_outputs, int len) {
  std::vector<Seq> out;
  const std::size_t total = ipow(n_outputs, len);
  for (std::size_t i = 0; i < total; ++i) out.push_back(unpack(i, n_outputs, len));
  return out;
}

void record(CheckReport& rep, const Seq& xs, const Seq& as, double defect,
            double tol) {
  rep.max_defect = std::max(rep.max_defect, defect);
  if (defect > tol) {
    rep.pass = false;
    rep.violations.push_back({xs, as, defect});
  }
}

}  // namespace

ContextStructure merge_contexts(const ContextStructure& ctx) {
  std::vector<std::vector<int>> cs;
  for (auto c : ctx.contexts) {
    for (int x : c)
      if (x < 0 || x >= ctx.n_inputs)
        throw std::invalid_argument("context refers to an unknown input");
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (!c.empty()) cs.push_back(std::move(c));
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < cs.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < cs.size() && !changed; ++j)
        if (share_input(cs[i], cs[j])) {
          cs[i].insert(cs[i].end(), cs[j].begin(), cs[j].end());
          std::sort(cs[i].begin(), cs[i].end());
          cs[i].erase(std::unique(cs[i].begin(), cs[i].end()), cs[i].end());
          cs.erase(cs.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
        }
  }
  std::sort(cs.begin(), cs.end());
  return ContextStructure{ctx.n_inputs, std::move(cs)};
}

CheckReport check_repeatability(const QuantumMachine& m,
                                const ContextStructure& ctx, int L, double tol) {
  if (L < 2) throw std::invalid_argument("check_repeatability: L >= 2");
  CheckReport rep;
  const int no = m.instruments.empty() ? 0 : m.instruments[0].n_outputs();
  for (const auto& c : merge_contexts(ctx).contexts)
    for (int len = 1; len < L; ++len)
      for (const Seq& xs : context_words(c, len))
        for (const Seq& as : output_words(no, len)) {
          const double base = sequence_prob(m, xs, as);
          for (int i = 0; i < len; ++i) {
            Seq xs2 = xs;
            xs2.push_back(xs[i]);
            Seq as2 = as;
            as2.push_back(0);
            for (int b = 0; b < no; ++b) {
              as2.back() = b;
              const double expected = b == as[i] ? base : 0.0;
              record(rep, xs2, as2,
                     std::abs(sequence_prob(m, xs2, as2) - expected), tol);
            }
          }
        }
  return rep;
}

CheckReport check_permutation_invariance(const QuantumMachine& m,
                                         const ContextStructure& ctx, int L,
                                         double tol) {
  if (L < 2) throw std::invalid_argument("check_permutation_invariance: L >= 2");
  CheckReport rep;
  const int no = m.instruments.empty() ? 0 : m.instruments[0].n_outputs();
  for (const auto& c : merge_contexts(ctx).contexts)
    for (int len = 2; len <= L; ++len)
      for (const Seq& xs : context_words(c, len))
        for (const Seq& as : output_words(no, len)) {
          const double base = sequence_prob(m, xs, as);
          std::vector<int> perm(len);
          for (int k = 0; k < len; ++k) perm[k] = k;
          while (std::next_permutation(perm.begin(), perm.end())) {
            Seq pxs(len), pas(len);
            for (int k = 0; k < len; ++k) {
              pxs[k] = xs[perm[k]];
              pas[k] = as[perm[k]];
            }
            record(rep, xs, as, std::abs(sequence_prob(m, pxs, pas) - base), tol);
          }
        }
  return rep;
}

std::optional<std::vector<Eigen::Vector2cd>> is_projective_mnp(
    const KrausInstrument& inst, double tol) {
  if (inst.dim() != 2)
    throw std::invalid_argument("is_projective_mnp: qubit instruments only");
  const int no = inst.n_outputs();
  for (int c = 0; c < no; ++c)
    for (int d = 0; d < no; ++d) {
      if (c == d) continue;
      for (const auto& K : inst.kraus[c])
        for (const auto& Q : inst.kraus[d])
          if ((K * Q).norm() > tol || (Q * K).norm() > tol) return std::nullopt;
    }

  std::vector<Eigen::Vector2cd> states;
  for (int c = 0; c < no; ++c) {
    CMat rep;
    bool have = false;
    double wsum = 0.0;
    for (const auto& Q : inst.kraus[c]) {
      const double nn = Q.norm();
      if (nn <= tol) continue;
      Eigen::JacobiSVD<CMat> svd(Q);
      if (svd.singularValues()(1) > tol) return std::nullopt;  // not rank one
      CMat qhat = Q / nn;
      if (!have) {
        rep = qhat;
        have = true;
      } else if (std::abs(std::abs((rep.adjoint() * qhat).trace()) - 1.0) > tol) {
        return std::nullopt;  // branches of one outcome not proportional
      }
      wsum += nn * nn;
    }
    if (!have) {
      states.push_back(Eigen::Vector2cd::Zero());
      continue;
    }
    const CMat Q = std::sqrt(wsum) * rep;
    if ((Q.adjoint() * Q.adjoint() * Q * Q - Q.adjoint() * Q).norm() > tol)
      return std::nullopt;  // idempotence, forces Q = phase * |psi><psi|
    Eigen::JacobiSVD<CMat> svd(Q, Eigen::ComputeFullV);
    Eigen::Vector2cd psi = svd.matrixV().col(0);
    const int j = std::abs(psi(0)) >= std::abs(psi(1)) ? 0 : 1;
    psi *= std::conj(psi(j)) / std::abs(psi(j));
    states.push_back(psi);
  }
  return states;
}

bool overlap_dichotomy_check(
    const std::vector<std::vector<Eigen::Vector2cd>>& states_per_input,
    double tol) {
  for (std::size_t i = 0; i < states_per_input.size(); ++i)
    for (std::size_t j = i + 1; j < states_per_input.size(); ++j)
      for (const auto& a : states_per_input[i])
        for (const auto& b : states_per_input[j]) {
          const double o = std::abs(a.dot(b));
          if (o > tol && std::abs(o - 1.0) > tol) return false;
        }
  return true;
}

std::vector<CMat> reachable_prestates(const QuantumMachine& m,
                                      const ContextStructure& ctx, int z, int L,
                                      double tol) {
  const ContextStructure merged = merge_contexts(ctx);
  const std::vector<int>* c = nullptr;
  for (const auto& cand : merged.contexts)
    if (std::find(cand.begin(), cand.end(), z) != cand.end()) c = &cand;
  if (!c) return {};

  std::vector<CMat> seen = {m.rho0};
  std::vector<CMat> frontier = {m.rho0};
  for (int step = 1; step < L && !frontier.empty(); ++step) {
    std::vector<CMat> next;
    for (const CMat& rho : frontier)
      for (int x : *c) {
        const auto& inst = m.instruments[static_cast<std::size_t>(x)];
        for (int a = 0; a < inst.n_outputs(); ++a) {
          auto [p, post] = state_update(rho, inst, a);
          if (p <= tol) continue;
          bool fresh = true;
          for (const CMat& s : seen)
            if ((s - post).norm() <= tol) {
              fresh = false;
              break;
            }
          if (fresh) {
            seen.push_back(post);
            next.push_back(post);
          }
        }
      }
    frontier = std::move(next);
  }
  return seen;
}

std::vector<int> constant_output_inputs(const QuantumMachine& m,
                                        const ContextStructure& ctx, int L,
                                        double tol) {
  std::vector<int> out;
  for (int z = 0; z < m.n_inputs(); ++z) {
    const std::vector<CMat> pre = reachable_prestates(m, ctx, z, L, tol);
    if (pre.empty()) continue;
    const auto& inst = m.instruments[static_cast<std::size_t>(z)];
    for (int c = 0; c < inst.n_outputs(); ++c) {
      bool only_c = true;
      for (const CMat& rho : pre) {
        double other = 0.0;
        for (int a = 0; a < inst.n_outputs(); ++a)
          if (a != c) other += (rho * inst.effect(a)).trace().real();
        if (other > tol) {
          only_c = false;
          break;
        }
      }
      if (only_c) {
        out.push_back(z);
        break;
      }
    }
  }
  return out;
}

std::vector<int> fixed_prestate_inputs(const QuantumMachine& m,
                                       const ContextStructure& ctx, int L,
                                       double tol) {
  std::vector<int> out;
  for (int z = 0; z < m.n_inputs(); ++z) {
    const std::vector<CMat> pre = reachable_prestates(m, ctx, z, L, tol);
    if (pre.size() == 1) out.push_back(z);
  }
  return out;
}

double model_prob(const NoncontextualModel& model, const Seq& xs, const Seq& as) {
  if (xs.size() != as.size())
    throw std::invalid_argument("sequence length mismatch");
  const int nb = static_cast<int>(model.p_ref.size());
  double p = 0.0;
  for (int b = 0; b < nb; ++b) {
    double term = model.p_ref(b);
    for (std::size_t i = 0; i < xs.size() && term != 0.0; ++i) {
      const auto it = std::find(model.context.begin(), model.context.end(), xs[i]);
      if (it == model.context.end())
        throw std::out_of_range("input outside the model context");
      const auto k = static_cast<std::size_t>(it - model.context.begin());
      if (as[i] < 0 || as[i] >= model.f[static_cast<std::size_t>(b)][k].size())
        throw std::out_of_range("output symbol");
      term *= model.f[static_cast<std::size_t>(b)][k](as[i]);
    }
    p += term;
  }
  return p;
}

NoncontextualModel build_noncontextual_model(const QuantumMachine& m,
                                             const ContextStructure& ctx,
                                             int reference_input, int L,
                                             double tol) {
  const ContextStructure merged = merge_contexts(ctx);
  const std::vector<int>* c = nullptr;
  for (const auto& cand : merged.contexts)
    if (std::find(cand.begin(), cand.end(), reference_input) != cand.end())
      c = &cand;
  if (!c)
    throw std::runtime_error("reference input does not belong to any context");

  const ContextStructure single{ctx.n_inputs, {*c}};
  if (!check_repeatability(m, single, L, tol).pass)
    throw std::runtime_error("repeatability check failed");
  if (!check_permutation_invariance(m, single, L, tol).pass)
    throw std::runtime_error("permutation invariance check failed");

  std::vector<std::vector<Eigen::Vector2cd>> states;
  for (int x : *c) {
    auto st = is_projective_mnp(m.instruments[static_cast<std::size_t>(x)], tol);
    if (!st)
      throw std::runtime_error(
          "projective measure-and-prepare check failed for input " +
          std::to_string(x));
    states.push_back(*st);
  }
  if (!overlap_dichotomy_check(states, tol))
    throw std::runtime_error("overlap dichotomy check failed");

  const auto ref_pos = static_cast<std::size_t>(
      std::find(c->begin(), c->end(), reference_input) - c->begin());
  const auto& ref_states = states[ref_pos];
  const int nb = static_cast<int>(ref_states.size());

  NoncontextualModel model;
  model.context = *c;
  model.reference_input = reference_input;
  model.p_ref = Eigen::VectorXd::Zero(nb);
  const auto& ref_inst =
      m.instruments[static_cast<std::size_t>(reference_input)];
  for (int b = 0; b < nb; ++b)
    model.p_ref(b) =
        std::max(0.0, (m.rho0 * ref_inst.effect(b)).trace().real());

  model.f.assign(static_cast<std::size_t>(nb), {});
  for (int b = 0; b < nb; ++b) {
    auto& row = model.f[static_cast<std::size_t>(b)];
    for (std::size_t k = 0; k < c->size(); ++k) {
      const auto& sx = states[k];
      Eigen::VectorXd ind = Eigen::VectorXd::Zero(sx.size());
      for (std::size_t a = 0; a < sx.size(); ++a)
        if (std::abs(ref_states[static_cast<std::size_t>(b)].dot(sx[a])) > 0.5)
          ind(static_cast<Eigen::Index>(a)) = 1.0;
      row.push_back(ind);
    }
  }

  // relabeling sanity: every firing outcome matches exactly one reference ray
  for (std::size_t k = 0; k < c->size(); ++k)
    for (std::size_t a = 0; a < states[k].size(); ++a) {
      if (states[k][a].norm() <= tol) continue;
      int hits = 0;
      for (int b = 0; b < nb; ++b)
        hits += model.f[static_cast<std::size_t>(b)][k](static_cast<Eigen::Index>(a)) > 0.5;
      if (hits != 1)
        throw std::runtime_error("relabeling extraction failed for input " +
                                 std::to_string((*c)[k]));
    }
  return model;
}

}  // namespace tcorr
