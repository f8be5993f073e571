#pragma once

#include <optional>
#include <vector>

#include "torrent/common.hpp"

namespace torrent {

// Equality-constrained basis pursuit baseline:
//   min ||z||_1  s.t.  A z = y,   A = [X^T  (1/lambda) I],  z = [theta; lambda b]
// solved by operator splitting: alternate an exact projection onto {Az = y}
// with soft-thresholding shrinkage (scaled dual updates).
struct L1Config {
  double lambda = 1.0;
  double admm_rho = 1.0;
  double abs_tol = 1e-7;
  double rel_tol = 1e-5;
  Index max_iters = 5000;
  std::vector<double> lambda_grid;  // optional model-selection grid
  bool keep_objective_trace = false;
};

struct L1Result {
  Model model;        // theta block
  Vector corruption;  // second block divided by lambda
  Index iters = 0;
  bool converged = false;
  // Best (feasible-iterate) objective after each iteration, when requested.
  std::vector<double> objective_trace;
};

void validate(const L1Config& config);

// Returns the best feasible iterate seen; `converged` is false when the
// primal/dual residuals never met tolerance within the iteration cap.
L1Result l1_solve(const Matrix& x, const Vector& y, const L1Config& config);

struct L1GridResult {
  Model model;
  Vector corruption;
  double lambda = 0.0;
  double score = 0.0;
  bool converged = false;
};

// Runs l1_solve per grid point (in parallel) and keeps the best model:
// lowest ||theta - w*||_2 when ground truth is supplied, otherwise the lowest
// trimmed residual (L2 norm of the ceil((1 - trim_beta) n) smallest
// residuals).
L1GridResult l1_grid_fit(const Matrix& x, const Vector& y, const std::vector<double>& grid,
                         const Model* ground_truth = nullptr, double trim_beta = 0.1,
                         const L1Config& base = {});

// 20-point log grid over [1e-3, 1e2].
std::vector<double> default_lambda_grid();

}  // namespace torrent
