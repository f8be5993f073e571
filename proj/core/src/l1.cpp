#include "torrent/l1.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

#include "torrent/parallel.hpp"
#include "torrent/thresholding.hpp"

namespace torrent {

namespace {

// Projection onto {A z = y}, A = [X^T  (1/lambda) I]. The Gram A A^T equals
// X^T X + (1/lambda^2) I_n; with p << n the inverse applies through a p x p
// Woodbury factor, so factoring once per solve is the dominant cost.
class EqualityProjector {
 public:
  EqualityProjector(const Matrix& x, double lambda)
      : x_(x), inv_lambda_(1.0 / lambda), c_(1.0 / (lambda * lambda)) {
    const Index p = x.rows();
    const Index n = x.cols();
    woodbury_ = p < n;
    if (woodbury_) {
      Matrix small = Matrix::Zero(p, p);
      small.selfadjointView<Eigen::Lower>().rankUpdate(x_);
      small.diagonal().array() += c_;
      llt_.compute(small.selfadjointView<Eigen::Lower>());
    } else {
      Matrix big = x_.transpose() * x_;
      big.diagonal().array() += c_;
      llt_.compute(big);
    }
    if (llt_.info() != Eigen::Success) {
      throw SingularSystem("l1_solve: projector factorization failed");
    }
  }

  Vector apply_a(const Vector& z) const {
    const Index p = x_.rows();
    const Index n = x_.cols();
    return x_.transpose() * z.head(p) + inv_lambda_ * z.tail(n);
  }

  Vector apply_at(const Vector& w) const {
    Vector out(x_.rows() + x_.cols());
    out.head(x_.rows()) = x_ * w;
    out.tail(x_.cols()) = inv_lambda_ * w;
    return out;
  }

  // (A A^T)^{-1} w
  Vector solve_gram(const Vector& w) const {
    if (woodbury_) {
      return (w - x_.transpose() * llt_.solve(x_ * w)) / c_;
    }
    return llt_.solve(w);
  }

  Vector project(const Vector& z, const Vector& y) const {
    return z - apply_at(solve_gram(apply_a(z) - y));
  }

 private:
  const Matrix& x_;
  double inv_lambda_;
  double c_;
  bool woodbury_;
  Eigen::LLT<Matrix> llt_;
};

Vector shrink(const Vector& v, double kappa) {
  return v.array().sign() * (v.array().abs() - kappa).max(0.0);
}

}  // namespace

void validate(const L1Config& config) {
  if (!(config.lambda > 0.0)) throw BadSpec("l1: lambda must be positive");
  if (!(config.admm_rho > 0.0)) throw BadSpec("l1: rho must be positive");
  if (!(config.abs_tol > 0.0) || !(config.rel_tol > 0.0)) {
    throw BadSpec("l1: tolerances must be positive");
  }
  if (config.max_iters < 1) throw BadSpec("l1: max_iters must be at least 1");
}

L1Result l1_solve(const Matrix& x, const Vector& y, const L1Config& config) {
  validate(config);
  if (x.cols() != y.size()) throw DimensionMismatch("l1_solve: len(y) != n");
  const Index p = x.rows();
  const Index n = x.cols();
  const Index m = p + n;

  const EqualityProjector projector(x, config.lambda);

  Vector z = Vector::Zero(m);
  Vector u = Vector::Zero(m);
  Vector best = Vector::Zero(m);
  double best_objective = std::numeric_limits<double>::infinity();

  L1Result result;
  if (config.keep_objective_trace) {
    result.objective_trace.reserve(static_cast<std::size_t>(config.max_iters));
  }

  const double sqrt_m = std::sqrt(static_cast<double>(m));

  for (Index it = 1; it <= config.max_iters; ++it) {
    const Vector xk = projector.project(z - u, y);  // feasible by construction
    const Vector z_old = z;
    z = shrink(xk + u, 1.0 / config.admm_rho);
    u += xk - z;

    const double objective = xk.lpNorm<1>();
    if (objective < best_objective) {
      best_objective = objective;
      best = xk;
    }
    if (config.keep_objective_trace) result.objective_trace.push_back(best_objective);
    result.iters = it;

    const double r_norm = (xk - z).norm();
    const double s_norm = config.admm_rho * (z - z_old).norm();
    const double eps_pri =
        sqrt_m * config.abs_tol + config.rel_tol * std::max(xk.norm(), z.norm());
    const double eps_dual =
        sqrt_m * config.abs_tol + config.rel_tol * config.admm_rho * u.norm();
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      result.converged = true;
      break;
    }
  }

  result.model = best.head(p);
  result.corruption = best.tail(n) / config.lambda;
  return result;
}

L1GridResult l1_grid_fit(const Matrix& x, const Vector& y, const std::vector<double>& grid,
                         const Model* ground_truth, double trim_beta, const L1Config& base) {
  if (grid.empty()) throw BadSpec("l1_grid_fit: grid must be non-empty");
  if (!(trim_beta >= 0.0 && trim_beta < 1.0)) {
    throw BadSpec("l1_grid_fit: trim_beta must lie in [0, 1)");
  }
  const Index n = x.cols();

  struct Entry {
    L1Result run;
    double score = std::numeric_limits<double>::infinity();
  };
  std::vector<Entry> entries(grid.size());

  parallel_for(static_cast<Index>(grid.size()), [&](Index g) {
    L1Config cfg = base;
    cfg.lambda = grid[static_cast<std::size_t>(g)];
    Entry& e = entries[static_cast<std::size_t>(g)];
    e.run = l1_solve(x, y, cfg);
    double score;
    if (ground_truth) {
      score = (e.run.model - *ground_truth).norm();
    } else {
      // Trimmed residual: L2 norm of the ceil((1 - trim_beta) n) smallest.
      const Vector r = y - x.transpose() * e.run.model;
      const Index keep = std::min<Index>(
          n, std::max<Index>(1, static_cast<Index>(std::ceil((1.0 - trim_beta) * n - 1e-9))));
      score = norm_on(r, hard_threshold_indices(r, keep));
    }
    e.score = std::isfinite(score) ? score : std::numeric_limits<double>::infinity();
  });

  std::size_t best = 0;
  for (std::size_t g = 1; g < entries.size(); ++g) {
    if (entries[g].score < entries[best].score) best = g;
  }

  L1GridResult out;
  out.model = std::move(entries[best].run.model);
  out.corruption = std::move(entries[best].run.corruption);
  out.lambda = grid[best];
  out.score = entries[best].score;
  out.converged = entries[best].run.converged;
  return out;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid(20);
  const double lo = std::log(1e-3);
  const double hi = std::log(1e2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / 19.0);
  }
  return grid;
}

}  // namespace torrent
