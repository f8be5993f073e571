#include "torrent/iht.hpp"

#include <cassert>
#include <cmath>
#include <optional>

#include "torrent/linalg.hpp"
#include "torrent/thresholding.hpp"

namespace torrent {

namespace {

bool same_support(const Model& a, const Model& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if ((a[i] != 0.0) != (b[i] != 0.0)) return false;
  }
  return true;
}

// Gradient restricted to the support of theta; at the zero model, to the s
// largest gradient entries.
Model restricted_gradient(const Vector& grad, const Model& theta, Index s) {
  bool any = false;
  Model g = Model::Zero(grad.size());
  for (Index i = 0; i < grad.size(); ++i) {
    if (theta[i] != 0.0) {
      g[i] = grad[i];
      any = true;
    }
  }
  if (!any) return hard_threshold_coefficients(grad, s);
  return g;
}

Model fixed_step_iht(const Matrix& x_s, const Vector& y_s, const IHTConfig& config,
                     Model theta, double step, double lambda_hat) {
#ifndef NDEBUG
  // The subset objective is non-increasing whenever the fixed step stays
  // within the majorization range.
  const bool monotone_regime = lambda_hat > 0.0 && step * lambda_hat <= 1.0 + 1e-9;
  double objective = (y_s - x_s.transpose() * theta).squaredNorm();
#else
  (void)lambda_hat;
#endif
  for (Index it = 0; it < config.max_inner_iters; ++it) {
    const Vector grad = x_s * (x_s.transpose() * theta - y_s);
    Model next = hard_threshold_coefficients(theta - step * grad, config.sparsity_s);
#ifndef NDEBUG
    if (monotone_regime) {
      const double next_objective = (y_s - x_s.transpose() * next).squaredNorm();
      assert(next_objective <= objective * (1.0 + 1e-6) + 1e-12);
      objective = next_objective;
    }
#endif
    const double change = (next - theta).norm();
    theta = std::move(next);
    if (change <= config.inner_tol) break;
  }
  return theta;
}

// Normalized IHT: exact line minimization along the support-restricted
// gradient, with the usual step-shrinking safeguard when the proposed support
// moves. Far more reliable than a global 1/lambda_max step at tight sparsity
// budgets, where the fixed step stalls in support-locked minima.
Model normalized_iht(const Matrix& x_s, const Vector& y_s, const IHTConfig& config,
                     Model theta) {
  std::optional<double> fallback_step;
  auto fallback = [&]() {
    if (!fallback_step) {
      const double lam = spectral_norm_estimate(x_s);
      fallback_step = lam > 0.0 ? 1.0 / lam : 1.0;
    }
    return *fallback_step;
  };

  for (Index it = 0; it < config.max_inner_iters; ++it) {
    const Vector grad = x_s * (x_s.transpose() * theta - y_s);
    const Model g_r = restricted_gradient(grad, theta, config.sparsity_s);
    const double denom = (x_s.transpose() * g_r).squaredNorm();
    double step = denom > 0.0 ? g_r.squaredNorm() / denom : fallback();

    Model next = hard_threshold_coefficients(theta - step * grad, config.sparsity_s);
    if (!same_support(next, theta)) {
      for (int shrink = 0; shrink < 60; ++shrink) {
        const Vector diff = next - theta;
        const double image = (x_s.transpose() * diff).squaredNorm();
        if (image <= 0.0 || step <= 0.99 * diff.squaredNorm() / image) break;
        step *= 0.5;
        next = hard_threshold_coefficients(theta - step * grad, config.sparsity_s);
      }
    }
    const double change = (next - theta).norm();
    theta = std::move(next);
    if (change <= config.inner_tol) break;
  }
  return theta;
}

}  // namespace

Model iht_solve(const Matrix& x_s, const Vector& y_s, const IHTConfig& config,
                const Model* warm_start) {
  const Index p = x_s.rows();
  if (x_s.cols() != y_s.size()) throw DimensionMismatch("iht_solve: |S| != len(y_S)");
  if (x_s.cols() < 1) throw DimensionMismatch("iht_solve: empty active set");
  if (config.sparsity_s < 1 || config.sparsity_s > p) {
    throw BadK("iht_solve: sparsity must lie in [1, p]");
  }
  if (config.step && !(*config.step > 0.0)) throw BadSpec("iht_solve: step must be positive");
  if (!(config.inner_tol > 0.0)) throw BadSpec("iht_solve: inner_tol must be positive");
  if (warm_start && warm_start->size() != p) {
    throw DimensionMismatch("iht_solve: warm start has wrong length");
  }

  Model theta = warm_start ? hard_threshold_coefficients(*warm_start, config.sparsity_s)
                           : Model::Zero(p);
  if (config.step) {
    return fixed_step_iht(x_s, y_s, config, std::move(theta), *config.step,
                          spectral_norm_estimate(x_s));
  }
  return normalized_iht(x_s, y_s, config, std::move(theta));
}

FitResult torrent_hd_solve(const Matrix& x, const Vector& y, const SolverConfig& config,
                           const GroundTruth& truth) {
  if (!config.sparsity_s) throw BadSpec("torrent_hd_solve: sparsity_s is required");
  SolverConfig hd = config;
  hd.variant = Variant::HD;
  return torrent_solve(x, y, hd, truth);
}

}  // namespace torrent
