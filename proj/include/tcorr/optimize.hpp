#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace tcorr {

struct OptimizationResult {
  double best_value = 0.0;
  Eigen::VectorXd parameters;   // layout documented by each objective
  int restarts_used = 0;
  std::vector<double> per_restart;
  std::uint64_t seed = 0;
};

struct AscentOptions {
  int max_iters = 5000;
  double fd_step = 1e-6;   // central-difference step
  int arc_tries = 55;      // step sizes 1, 1/2, ..., 2^-(arc_tries-1)
  bool minimize = false;
};

// One restart seeded deterministically from (seed, index).
std::mt19937_64 restart_rng(std::uint64_t seed, int restart_index);

// Projected gradient ascent: central finite differences on the raw objective,
// then a line search along the projection arc q(s) = proj(p + s*g) taking the
// best improving step on a geometric grid. Stops when no step improves.
// `metric` (optional) rescales gradient components; used where the parameter
// vector double-counts matrix entries so that the applied direction matches
// the true gradient of the underlying object.
double projected_ascent(const std::function<double(const Eigen::VectorXd&)>& f,
                        const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& proj,
                        Eigen::VectorXd& p, const AscentOptions& opts,
                        const Eigen::VectorXd* metric = nullptr);

// Multi-start driver. Start index 0 may be pinned to a deterministic point;
// the per-restart list makes best-so-far monotone under a fixed seed schedule.
OptimizationResult multistart(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& proj,
    const std::function<Eigen::VectorXd(std::mt19937_64&)>& draw_start,
    int restarts, std::uint64_t seed, const AscentOptions& opts,
    const Eigen::VectorXd* fixed_first_start = nullptr,
    const Eigen::VectorXd* metric = nullptr);

}  // namespace tcorr
