#include "torrent/solver.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>

#include "torrent/iht.hpp"
#include "torrent/linalg.hpp"
#include "torrent/thresholding.hpp"

namespace torrent {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::FC: return "fc";
    case Variant::GD: return "gd";
    case Variant::HYB: return "hyb";
    case Variant::HD: return "hd";
  }
  return "?";
}

const char* to_string(UpdateKind k) {
  return k == UpdateKind::FC ? "fc" : "gd";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::ResidualTol: return "residual_tol";
    case Termination::RelChange: return "rel_change";
    case Termination::MaxIters: return "max_iters";
  }
  return "?";
}

Index active_set_size(double beta, Index n) {
  // Ceiling so the clean-set budget is never undercut; the small slack keeps
  // exact products like 0.65 * 1000 from spilling over to 651.
  const double k = std::ceil((1.0 - beta) * static_cast<double>(n) - 1e-9);
  return std::min(n, std::max<Index>(1, static_cast<Index>(k)));
}

Model update_fc(const Matrix& x, const Vector& y, const ActiveSet& s) {
  return solve_least_squares(gather_columns(x, s), gather(y, s));
}

Model update_gd(const Matrix& x, const Vector& y, const ActiveSet& s,
                const Model& theta, double eta) {
  // Full-matrix form with a masked residual; gathering the subset costs more
  // than the two matvecs once p is large.
  const Vector predicted = x.transpose() * theta;
  Vector masked = Vector::Zero(x.cols());
  for (Index i : s) masked[i] = predicted[i] - y[i];
  return theta - eta * (x * masked);
}

std::pair<Model, UpdateKind> update_hyb(const Matrix& x, const Vector& y,
                                        const ActiveSet& s, const ActiveSet& s_prev,
                                        const Model& theta, double eta, Index delta) {
  const Index churn =
      std::max(set_difference_size(s, s_prev), set_difference_size(s_prev, s));
  if (churn > delta) {
    return {update_gd(x, y, s, theta, eta), UpdateKind::GD};
  }
  return {update_fc(x, y, s), UpdateKind::FC};
}

namespace {

void validate_config(const SolverConfig& c, Index p, Index n) {
  if (!(c.beta > 0.0 && c.beta <= 0.5)) throw BadSpec("beta must lie in (0, 0.5]");
  if (!(c.epsilon > 0.0)) throw BadSpec("epsilon must be positive");
  if (c.step_size && !(*c.step_size > 0.0)) throw BadSpec("step size must be positive");
  if (c.delta < 0) throw BadSpec("delta must be non-negative");
  if (c.max_iters < 1) throw BadSpec("max_iters must be at least 1");
  if (!(c.rel_change_tol >= 0.0)) throw BadSpec("rel_change_tol must be non-negative");
  if (c.sparsity_s && (*c.sparsity_s < 1 || *c.sparsity_s > p)) {
    throw BadSpec("sparsity_s must lie in [1, p]");
  }
  if (c.variant == Variant::HD && !c.sparsity_s) {
    throw BadSpec("HD variant requires sparsity_s");
  }
  if (c.whiten_with && (c.whiten_with->rows() != p || c.whiten_with->cols() != p)) {
    throw BadSpec("whitening matrix must be p x p");
  }
  (void)n;
}

Matrix inverse_sqrt_spd(const Matrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw BadSpec("whitening matrix must be symmetric positive definite");
  }
  return es.operatorInverseSqrt();
}

}  // namespace

FitResult torrent_solve(const Matrix& x, const Vector& y, const SolverConfig& config,
                        const GroundTruth& truth) {
  if (x.cols() != y.size()) throw DimensionMismatch("torrent_solve: len(y) != n");
  const Index p = x.rows();
  const Index n = x.cols();
  if (p < 1 || n < 1) throw DimensionMismatch("torrent_solve: empty problem");
  validate_config(config, p, n);
  if (truth.w_star && truth.w_star->size() != p) {
    throw DimensionMismatch("torrent_solve: ground-truth model has wrong length");
  }
  if (truth.corruption && truth.corruption->size() != n) {
    throw DimensionMismatch("torrent_solve: corruption vector has wrong length");
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&start]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  // Fit in whitened coordinates when requested, report in the original ones.
  Matrix whitener;
  const bool whiten = config.whiten_with.has_value();
  const Matrix* design = &x;
  Matrix whitened;
  if (whiten) {
    whitener = inverse_sqrt_spd(*config.whiten_with);
    whitened = whitener * x;
    design = &whitened;
  }
  auto to_original = [&](const Model& theta) -> Model {
    return whiten ? Model(whitener * theta) : theta;
  };

  auto spectral_step = [&]() {
    const double lam = spectral_norm_estimate(*design);
    return lam > 0.0 ? 1.0 / lam : 1.0;
  };
  double eta = 0.0;
  if (config.variant == Variant::GD || config.variant == Variant::HYB) {
    eta = config.step_size ? *config.step_size : spectral_step();
  }

  const Index k = active_set_size(config.beta, n);

  Model theta = Model::Zero(p);
  ActiveSet active = full_set(n);
  ActiveSet previous;  // empty sentinel: everything counts as churned at t=1

  FitResult result;
  result.trace.reserve(static_cast<std::size_t>(std::min<Index>(config.max_iters, 1024)));
  result.termination = Termination::MaxIters;

  for (Index t = 1; t <= config.max_iters; ++t) {
    Model next;
    UpdateKind kind = UpdateKind::FC;
    switch (config.variant) {
      case Variant::FC:
        next = update_fc(*design, y, active);
        break;
      case Variant::GD:
        next = update_gd(*design, y, active, theta, eta);
        kind = UpdateKind::GD;
        break;
      case Variant::HYB: {
        auto [model, chosen] = update_hyb(*design, y, active, previous, theta, eta,
                                          config.delta);
        next = std::move(model);
        kind = chosen;
        break;
      }
      case Variant::HD: {
        IHTConfig inner;
        inner.sparsity_s = *config.sparsity_s;
        inner.step = config.step_size;
        inner.inner_tol = 1e-2 * config.epsilon;
        next = iht_solve(gather_columns(*design, active), gather(y, active), inner);
        break;
      }
    }

    const Vector r = residuals(*design, y, next);
    ActiveSet selected = hard_threshold_indices(r, k);

    IterationRecord rec;
    rec.iter = t;
    rec.update_kind = kind;
    rec.active_residual_norm = norm_on(r, selected);
    if (truth.w_star) {
      rec.model_error = (to_original(next) - *truth.w_star).norm();
    }
    if (truth.corruption) {
      rec.corruption_mass = norm_on(*truth.corruption, selected);
    }
    rec.set_churn = set_difference_size(selected, active);
    rec.elapsed_sec = elapsed();
    result.trace.push_back(rec);

    const double model_change = (next - theta).norm();
    const double model_scale = next.norm();

    previous = std::move(active);
    active = std::move(selected);
    theta = std::move(next);

    if (rec.active_residual_norm <= config.epsilon) {
      result.termination = Termination::ResidualTol;
      break;
    }
    if (t > 1 && model_change <= config.rel_change_tol * model_scale) {
      result.termination = Termination::RelChange;
      break;
    }
  }

  result.model = to_original(theta);
  result.active_set = std::move(active);
  result.wall_time = elapsed();
  return result;
}

}  // namespace torrent
