#include "torrent/linalg.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace torrent {

namespace {

// Residual check on the normal equations; a "successful" LLT of a nearly
// singular Gram matrix can still return garbage.
bool normal_equations_ok(const Matrix& gram, const Vector& rhs, const Model& theta) {
  if (!theta.allFinite()) return false;
  const double scale = gram.norm() * theta.norm() + rhs.norm();
  return (gram.selfadjointView<Eigen::Lower>() * theta - rhs).norm() <= 1e-8 * (1.0 + scale);
}

}  // namespace

Model solve_least_squares(const Matrix& x_s, const Vector& y_s) {
  if (x_s.cols() != y_s.size()) {
    throw DimensionMismatch("solve_least_squares: |S| != len(y_S)");
  }
  if (x_s.cols() < 1) {
    throw DimensionMismatch("solve_least_squares: empty active set");
  }
  const Index p = x_s.rows();

  Matrix gram = Matrix::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x_s);
  const Vector rhs = x_s * y_s;

  Eigen::LLT<Matrix> llt(gram.selfadjointView<Eigen::Lower>());
  if (llt.info() == Eigen::Success) {
    Model theta = llt.solve(rhs);
    if (normal_equations_ok(gram, rhs, theta)) return theta;
  }

  // Rank-deficient active sets happen in early iterations; fall back to a
  // minimum-norm style solve with diagonal jitter.
  const double jitter = 1e-10 * gram.trace();
  if (!(jitter > 0.0)) {
    if (!rhs.allFinite() || !std::isfinite(jitter)) {
      throw SingularSystem("solve_least_squares: non-finite inputs");
    }
    return Model::Zero(p);  // zero design: minimum-norm solution is zero
  }
  Matrix jittered = gram;
  jittered.diagonal().array() += jitter;
  llt.compute(jittered.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success) {
    throw SingularSystem("solve_least_squares: factorization failed");
  }
  Model theta = llt.solve(rhs);
  if (!theta.allFinite()) {
    throw SingularSystem("solve_least_squares: no finite solution");
  }
  return theta;
}

double spectral_norm_estimate(const Matrix& x_s) {
  if (x_s.rows() < 1 || x_s.cols() < 1) {
    throw DimensionMismatch("spectral_norm_estimate: empty matrix");
  }
  const Index p = x_s.rows();
  Vector v = Vector::Ones(p) / std::sqrt(static_cast<double>(p));
  double lambda = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    const Vector w = x_s * (x_s.transpose() * v);
    const double norm_w = w.norm();
    if (norm_w == 0.0) return 0.0;
    const double next = v.dot(w);  // Rayleigh quotient, v is unit
    v = w / norm_w;
    if (iter > 0 && std::abs(next - lambda) <= 1e-6 * std::abs(next)) {
      return next;
    }
    lambda = next;
  }
  return lambda;
}

Vector residuals(const Matrix& x, const Vector& y, const Model& theta) {
  if (x.cols() != y.size() || x.rows() != theta.size()) {
    throw DimensionMismatch("residuals: dimensions disagree");
  }
  return y - x.transpose() * theta;
}

}  // namespace torrent
