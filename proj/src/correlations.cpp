#include "tcorr/correlations.hpp"

#include <cmath>
#include <stdexcept>

namespace tcorr {

AotReport check_arrow_of_time(const CorrelationTable& t, double tol) {
  AotReport rep;
  const int L = t.length;
  for (int k = 1; k < L; ++k) {
    const std::size_t npx = ipow(t.n_inputs, k);
    const std::size_t npa = ipow(t.n_outputs, k);
    const std::size_t nsx = ipow(t.n_inputs, L - k);
    const std::size_t nsa = ipow(t.n_outputs, L - k);
    for (std::size_t px = 0; px < npx; ++px)
      for (std::size_t pa = 0; pa < npa; ++pa) {
        double ref = 0.0;
        for (std::size_t sx = 0; sx < nsx; ++sx) {
          double marg = 0.0;
          for (std::size_t sa = 0; sa < nsa; ++sa)
            marg += t.p(static_cast<Eigen::Index>(px * nsx + sx),
                        static_cast<Eigen::Index>(pa * nsa + sa));
          if (sx == 0) {
            ref = marg;
            continue;
          }
          double defect = std::abs(marg - ref);
          rep.max_defect = std::max(rep.max_defect, defect);
          if (defect > tol) {
            rep.pass = false;
            rep.violations.push_back({k, px, pa, 0, sx, defect});
          }
        }
      }
  }
  return rep;
}

// Prefix marginal with all-zero suffix inputs; well defined once the table
// passes the arrow-of-time check.
static double prefix_prob(const CorrelationTable& t, int k, std::size_t px,
                          std::size_t pa) {
  const int L = t.length;
  const std::size_t nsx = ipow(t.n_inputs, L - k);
  const std::size_t nsa = ipow(t.n_outputs, L - k);
  double m = 0.0;
  for (std::size_t sa = 0; sa < nsa; ++sa)
    m += t.p(static_cast<Eigen::Index>(px * nsx),
             static_cast<Eigen::Index>(pa * nsa + sa));
  return m;
}

Decomposition decompose(const CorrelationTable& t, double tol) {
  AotReport rep = check_arrow_of_time(t, tol);
  if (!rep.pass)
    throw std::invalid_argument("decompose: table violates arrow-of-time constraints");
  Decomposition d{t.n_inputs, t.n_outputs, t.length, {}, {}};
  for (int k = 0; k < t.length; ++k) {
    const std::size_t nx = ipow(t.n_inputs, k + 1);
    const std::size_t na = ipow(t.n_outputs, k + 1);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(nx, na);
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> def(nx, na);
    def.setConstant(false);
    for (std::size_t xi = 0; xi < nx; ++xi)
      for (std::size_t ai = 0; ai < na; ++ai) {
        double num = prefix_prob(t, k + 1, xi, ai);
        double den = k == 0 ? 1.0
                            : prefix_prob(t, k, xi / t.n_inputs, ai / t.n_outputs);
        if (den > 1e-15) {
          c(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(ai)) = num / den;
          def(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(ai)) = true;
        }
      }
    d.cond.push_back(std::move(c));
    d.defined.push_back(std::move(def));
  }
  return d;
}

CorrelationTable recompose(const Decomposition& d) {
  CorrelationTable t(d.n_inputs, d.n_outputs, d.length);
  for (std::size_t xi = 0; xi < t.num_input_seqs(); ++xi) {
    Seq xs = unpack(xi, d.n_inputs, d.length);
    for (std::size_t ai = 0; ai < t.num_output_seqs(); ++ai) {
      Seq as = unpack(ai, d.n_outputs, d.length);
      double p = 1.0;
      std::size_t px = 0, pa = 0;
      for (int k = 0; k < d.length && p != 0.0; ++k) {
        px = px * d.n_inputs + xs[k];
        pa = pa * d.n_outputs + as[k];
        if (!d.defined[k](static_cast<Eigen::Index>(px), static_cast<Eigen::Index>(pa))) {
          p = 0.0;  // zero-probability history
          break;
        }
        p *= d.cond[k](static_cast<Eigen::Index>(px), static_cast<Eigen::Index>(pa));
      }
      t.p(static_cast<Eigen::Index>(xi), static_cast<Eigen::Index>(ai)) = p;
    }
  }
  return t;
}

std::vector<CorrelationTable> enumerate_vertices(int L, int n_inputs,
                                                 int n_outputs, std::size_t cap) {
  // response function for step k+1 maps (packed x_{1..k+1}, packed a_{1..k})
  // to an output; flatten all steps into one mixed-radix odometer
  std::vector<std::size_t> domain_size(L);
  std::size_t digits = 0;
  for (int k = 0; k < L; ++k) {
    domain_size[k] = ipow(n_inputs, k + 1) * ipow(n_outputs, k);
    digits += domain_size[k];
  }
  double log_total = static_cast<double>(digits) * std::log2(double(n_outputs));
  if (log_total > 60 || ipow(n_outputs, static_cast<int>(digits)) > cap)
    throw std::length_error("vertex enumeration cap exceeded");

  std::vector<int> choice(digits, 0);
  std::vector<std::size_t> offset(L);
  for (int k = 1; k < L; ++k) offset[k] = offset[k - 1] + domain_size[k - 1];

  std::vector<CorrelationTable> out;
  while (true) {
    CorrelationTable t(n_inputs, n_outputs, L);
    for (std::size_t xi = 0; xi < t.num_input_seqs(); ++xi) {
      Seq xs = unpack(xi, n_inputs, L);
      std::size_t px = 0, pa = 0;
      Seq as(L);
      for (int k = 0; k < L; ++k) {
        px = px * n_inputs + xs[k];
        std::size_t flat = px * ipow(n_outputs, k) + pa;
        as[k] = choice[offset[k] + flat];
        pa = pa * n_outputs + as[k];
      }
      t.at(xs, as) = 1.0;
    }
    out.push_back(std::move(t));
    std::size_t c = 0;
    for (; c < digits; ++c) {
      if (++choice[c] < n_outputs) break;
      choice[c] = 0;
    }
    if (c == digits) break;
  }
  return out;
}

double s_functional(const CorrelationTable& t) {
  if (t.length != 2 || t.n_inputs != 2 || t.n_outputs != 2)
    throw std::invalid_argument("s_functional expects binary length-2 tables");
  return t.at({0, 0}, {0, 1}) + t.at({1, 0}, {1, 0}) + t.at({1, 1}, {1, 0});
}

}  // namespace tcorr
