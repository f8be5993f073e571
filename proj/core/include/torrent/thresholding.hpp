#pragma once

#include "torrent/common.hpp"

namespace torrent {

// Indices of the k smallest-magnitude entries of v, sorted ascending.
// Ties in magnitude are broken in favor of the smaller index so that traces
// are reproducible. Uses partial selection (expected O(n)); inputs shorter
// than 64 entries take a plain sort.
ActiveSet hard_threshold_indices(const Vector& v, Index k);

// Keeps the s largest-magnitude coefficients (ties in favor of the smaller
// index) and zeroes the rest. Idempotent for fixed s.
Model hard_threshold_coefficients(const Model& theta, Index s);

}  // namespace torrent
