#include "tcorr/optimize.hpp"

#include <algorithm>
#include <limits>

namespace tcorr {

std::mt19937_64 restart_rng(std::uint64_t seed, int restart_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart_index)};
  return std::mt19937_64(seq);
}

double projected_ascent(const std::function<double(const Eigen::VectorXd&)>& f,
                        const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& proj,
                        Eigen::VectorXd& p, const AscentOptions& opts,
                        const Eigen::VectorXd* metric) {
  const double sign = opts.minimize ? -1.0 : 1.0;
  p = proj(p);
  double fv = f(p);
  const Eigen::Index n = p.size();
  Eigen::VectorXd g(n), trial(n);

  for (int it = 0; it < opts.max_iters; ++it) {
    for (Eigen::Index k = 0; k < n; ++k) {
      trial = p;
      trial(k) = p(k) + opts.fd_step;
      double fp = f(trial);
      trial(k) = p(k) - opts.fd_step;
      double fm = f(trial);
      g(k) = sign * (fp - fm) / (2.0 * opts.fd_step);
    }
    if (metric) g = g.cwiseProduct(*metric);

    // best improving point along the projection arc
    double best_f = fv;
    Eigen::VectorXd best_q;
    double s = 1.0;
    for (int a = 0; a < opts.arc_tries; ++a, s *= 0.5) {
      Eigen::VectorXd q = proj(p + s * g);
      double fq = f(q);
      if (sign * (fq - best_f) > 0.0) {
        best_f = fq;
        best_q = std::move(q);
      }
    }
    if (best_q.size() == 0) break;
    p = std::move(best_q);
    fv = best_f;
  }
  return fv;
}

OptimizationResult multistart(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& proj,
    const std::function<Eigen::VectorXd(std::mt19937_64&)>& draw_start,
    int restarts, std::uint64_t seed, const AscentOptions& opts,
    const Eigen::VectorXd* fixed_first_start, const Eigen::VectorXd* metric) {
  OptimizationResult res;
  res.seed = seed;
  res.restarts_used = restarts;
  const double sign = opts.minimize ? -1.0 : 1.0;
  double best = -sign * std::numeric_limits<double>::infinity();

  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd p;
    if (r == 0 && fixed_first_start) {
      p = *fixed_first_start;
    } else {
      auto rng = restart_rng(seed, r);
      p = draw_start(rng);
    }
    double fv = projected_ascent(f, proj, p, opts, metric);
    res.per_restart.push_back(fv);
    if (sign * (fv - best) > 0.0) {
      best = fv;
      res.parameters = p;
    }
  }
  res.best_value = best;
  return res;
}

}  // namespace tcorr
