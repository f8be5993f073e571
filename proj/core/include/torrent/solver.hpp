#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "torrent/common.hpp"

namespace torrent {

enum class Variant { FC, GD, HYB, HD };
enum class UpdateKind { FC, GD };
enum class Termination { ResidualTol, RelChange, MaxIters };

const char* to_string(Variant v);
const char* to_string(UpdateKind k);
const char* to_string(Termination t);

struct SolverConfig {
  Variant variant = Variant::FC;
  // Assumed corruption budget; active sets have size ceil((1 - beta) * n).
  double beta = 0.1;
  // Stop once the residual norm on the active set drops to epsilon.
  double epsilon = 1e-10;
  // GD/HYB step size; defaults to 1 / lambda_max_estimate(X X^T).
  std::optional<double> step_size;
  // HYB stability threshold: GD while the active set churns more than delta.
  Index delta = 0;
  Index max_iters = 400;
  // With dense noise the residual never reaches epsilon, so also stop when
  // the relative model change falls below this.
  double rel_change_tol = 1e-14;
  // Target sparsity for the HD variant.
  std::optional<Index> sparsity_s;
  // Optional p x p invertible matrix; the solver fits on Sigma0^{-1/2} X and
  // maps the model back to the original coordinates.
  std::optional<Matrix> whiten_with;
};

struct IterationRecord {
  Index iter = 0;
  UpdateKind update_kind = UpdateKind::FC;
  // ||r^t restricted to S_t||_2 for the freshly selected set.
  double active_residual_norm = 0.0;
  // ||theta^t - w*||_2 when a reference model was supplied.
  std::optional<double> model_error;
  // ||b restricted to S_t||_2 when the reference corruption was supplied.
  std::optional<double> corruption_mass;
  // |S_t \ S_{t-1}|
  Index set_churn = 0;
  // Cumulative wall time at the end of this iteration.
  double elapsed_sec = 0.0;
};

struct FitResult {
  Model model;
  ActiveSet active_set;
  std::vector<IterationRecord> trace;
  Termination termination = Termination::MaxIters;
  double wall_time = 0.0;
};

// Reference quantities recorded into the trace when available.
struct GroundTruth {
  std::optional<Model> w_star;
  std::optional<Vector> corruption;
};

// ceil((1 - beta) * n), clamped to [1, n].
Index active_set_size(double beta, Index n);

// Fully corrective update: exact least squares on the active set.
Model update_fc(const Matrix& x, const Vector& y, const ActiveSet& s);

// One gradient step theta - eta * X_S (X_S^T theta - y_S); no line search.
Model update_gd(const Matrix& x, const Vector& y, const ActiveSet& s,
                const Model& theta, double eta);

// Chooses GD while the active set is still churning (more than delta entries
// changed against the previous set), FC once it has stabilized. The churn is
// max(|S \ S_prev|, |S_prev \ S|), which coincides with |S \ S_prev| for
// equal-sized sets and counts dropped indices when the sets differ in size
// (the first iteration against the initial full set).
std::pair<Model, UpdateKind> update_hyb(const Matrix& x, const Vector& y,
                                        const ActiveSet& s, const ActiveSet& s_prev,
                                        const Model& theta, double eta, Index delta);

// The outer hard-thresholding loop: starting from theta = 0 and the full
// sample set, alternately refit on the active set (per the configured
// variant) and reselect the ceil((1-beta) n) samples of least residual.
// Stops on the residual tolerance, on relative model change, or at the
// iteration cap. Identical inputs and config produce bit-identical traces.
FitResult torrent_solve(const Matrix& x, const Vector& y, const SolverConfig& config,
                        const GroundTruth& truth = {});

}  // namespace torrent
