#include "torrent/thresholding.hpp"

#include <algorithm>
#include <cmath>

namespace torrent {

namespace {

constexpr Index kSortCutoff = 64;

// Selects the k best indices of v under cmp and returns them sorted by index.
template <typename Compare>
ActiveSet select_indices(Index n, Index k, Compare cmp) {
  ActiveSet idx = full_set(n);
  if (n >= kSortCutoff) {
    std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), cmp);
  } else {
    std::sort(idx.begin(), idx.end(), cmp);
  }
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

ActiveSet hard_threshold_indices(const Vector& v, Index k) {
  const Index n = v.size();
  if (k < 1 || k > n) {
    throw BadK("hard_threshold_indices: k must lie in [1, n]");
  }
  // Smallest magnitudes first; equal magnitudes keep the smaller index.
  auto cmp = [&v](Index a, Index b) {
    const double ma = std::abs(v[a]);
    const double mb = std::abs(v[b]);
    return ma < mb || (ma == mb && a < b);
  };
  return select_indices(n, k, cmp);
}

Model hard_threshold_coefficients(const Model& theta, Index s) {
  const Index p = theta.size();
  if (s < 1 || s > p) {
    throw BadK("hard_threshold_coefficients: s must lie in [1, p]");
  }
  if (s == p) return theta;
  auto cmp = [&theta](Index a, Index b) {
    const double ma = std::abs(theta[a]);
    const double mb = std::abs(theta[b]);
    return ma > mb || (ma == mb && a < b);
  };
  const ActiveSet kept = select_indices(p, s, cmp);
  Model out = Model::Zero(p);
  for (Index i : kept) out[i] = theta[i];
  return out;
}

}  // namespace torrent
