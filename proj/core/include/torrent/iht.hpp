#pragma once

#include <optional>

#include "torrent/common.hpp"
#include "torrent/solver.hpp"

namespace torrent {

struct IHTConfig {
  Index sparsity_s = 1;
  // Explicit fixed gradient step. When unset, a normalized adaptive step is
  // used: exact line minimization along the support-restricted gradient with
  // a step-shrinking safeguard on support changes. A fixed 1/lambda_max step
  // is safe but stalls in support-locked minima at tight sparsity budgets.
  std::optional<double> step;
  // Stop once ||theta_{k+1} - theta_k||_2 falls below this. The HD solver
  // wires it to 1e-2 times its outer epsilon.
  double inner_tol = 1e-8;
  Index max_inner_iters = 1000;
};

// Iterative hard thresholding for the s-sparse least-squares subproblem:
// theta <- HT_s(theta - step * X_S (X_S^T theta - y_S)) from the warm start
// (or zero) until the iterate stops moving or the cap is hit. The returned
// model always has at most s nonzeros.
Model iht_solve(const Matrix& x_s, const Vector& y_s, const IHTConfig& config,
                const Model* warm_start = nullptr);

// High-dimensional variant of the outer loop: the corrective update is an
// s-sparse IHT solve on the active set, restarted from zero each iteration
// (warm starts can lock in a wrong support under heavy corruption).
// Thresholding and termination are identical to torrent_solve.
FitResult torrent_hd_solve(const Matrix& x, const Vector& y, const SolverConfig& config,
                           const GroundTruth& truth = {});

}  // namespace torrent
