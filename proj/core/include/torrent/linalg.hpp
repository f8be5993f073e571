#pragma once

#include "torrent/common.hpp"

namespace torrent {

// Least squares on a column subset: minimizes sum_{i in S} (y_i - <theta, x_i>)^2
// by normal equations with an LLT factorization. Rank-deficient systems fall
// back to a minimum-norm solve (diagonal jitter of 1e-10 * trace, re-factored).
// Throws SingularSystem only when even the fallback cannot produce finite
// coefficients (non-finite inputs, say).
Model solve_least_squares(const Matrix& x_s, const Vector& y_s);

// Estimate of lambda_max(X_S X_S^T) by power iteration from the normalized
// all-ones vector; relative tolerance 1e-6, iteration cap 500. The returned
// value never exceeds the true maximum eigenvalue.
double spectral_norm_estimate(const Matrix& x_s);

// r_i = y_i - <theta, x_i>
Vector residuals(const Matrix& x, const Vector& y, const Model& theta);

}  // namespace torrent
