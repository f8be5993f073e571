#include <doctest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "torrent/rng.hpp"
#include "torrent/thresholding.hpp"

using namespace torrent;

namespace {

// Mix of continuous values and small integers so magnitude ties are common.
Vector tie_prone_vector(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    if (rng.uniform01() < 0.5) {
      v[i] = static_cast<double>(rng.uniform_index(5)) - 2.0;
    } else {
      v[i] = rng.gaussian();
    }
  }
  return v;
}

}  // namespace

TEST_CASE("hard threshold keeps the smallest magnitudes") {
  Vector v(3);
  v << 3, -1, 2;
  const ActiveSet kept = hard_threshold_indices(v, 2);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0] == 1);
  CHECK(kept[1] == 2);
}

TEST_CASE("hard threshold with k = n is the identity selection") {
  Vector v(5);
  v << 5, -2, 0, 9, 1;
  CHECK(hard_threshold_indices(v, 5) == full_set(5));
}

TEST_CASE("magnitude ties break toward the smaller index") {
  Vector v(2);
  v << 1, -1;
  const ActiveSet kept = hard_threshold_indices(v, 1);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0] == 0);
}

TEST_CASE("hard threshold rejects k outside [1, n]") {
  Vector v(3);
  v << 1, 2, 3;
  CHECK_THROWS_AS(hard_threshold_indices(v, 0), BadK);
  CHECK_THROWS_AS(hard_threshold_indices(v, 4), BadK);
}

TEST_CASE("selection agrees with the full-sort oracle, ties included") {
  Rng rng(20240517);
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + rng.uniform_index(200);  // crosses the sort cutoff
    const Vector v = tie_prone_vector(n, rng);
    const Index k = 1 + rng.uniform_index(n);
    CHECK(hard_threshold_indices(v, k) == oracles::sort_select_smallest(v, k));
  }
}

TEST_CASE("selected set dominates any random set of the same size") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 10 + rng.uniform_index(50);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.gaussian();
    const Index k = 1 + rng.uniform_index(n);
    const ActiveSet kept = hard_threshold_indices(v, k);
    const double kept_norm = norm_on(v, kept);
    const ActiveSet other = rng.sample_without_replacement(n, k);
    CHECK(kept_norm <= norm_on(v, other) + 1e-12);
  }
}

TEST_CASE("boundary between kept and dropped respects magnitude order") {
  Rng rng(88);
  for (int trial = 0; trial < 300; ++trial) {
    const Index n = 2 + rng.uniform_index(120);
    const Vector v = tie_prone_vector(n, rng);
    const Index k = 1 + rng.uniform_index(n - 1);  // leave at least one out
    const ActiveSet kept = hard_threshold_indices(v, k);
    const ActiveSet dropped = set_complement(kept, n);

    double max_inside = 0.0;
    Index argmax_inside = -1;
    for (Index i : kept) {
      if (std::abs(v[i]) >= max_inside) {
        max_inside = std::abs(v[i]);
        argmax_inside = i;
      }
    }
    double min_outside = std::numeric_limits<double>::infinity();
    Index argmin_outside = -1;
    for (Index i : dropped) {
      if (std::abs(v[i]) < min_outside) {
        min_outside = std::abs(v[i]);
        argmin_outside = i;
      }
    }
    const bool ordered = max_inside < min_outside;
    const bool tie_with_index_rule = max_inside == min_outside && argmax_inside < argmin_outside;
    CHECK((ordered || tie_with_index_rule));
  }
}

// For S2 = the pn smallest magnitudes and any random S1 of size qn >= pn:
// ||v_S2||^2 <= (p/q) ||v_S1||^2.
TEST_CASE("small-selection energy bound over random sets") {
  Rng rng(20151209);
  const Index n = 40;
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.gaussian();
    const Index kq = 1 + rng.uniform_index(n);
    const Index kp = 1 + rng.uniform_index(kq);
    const ActiveSet s1 = rng.sample_without_replacement(n, kq);
    const ActiveSet s2 = hard_threshold_indices(v, kp);
    const double lhs = norm_on(v, s2);
    const double rhs = norm_on(v, s1);
    const double ratio = static_cast<double>(kp) / static_cast<double>(kq);
    CHECK(lhs * lhs <= ratio * rhs * rhs + 1e-12);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("coefficient thresholding keeps the largest entries") {
  Vector theta(3);
  theta << 0.1, -5, 3;
  const Model kept = hard_threshold_coefficients(theta, 2);
  CHECK(kept[0] == 0.0);
  CHECK(kept[1] == -5.0);
  CHECK(kept[2] == 3.0);
  CHECK((kept - oracles::sort_keep_largest(theta, 2)).norm() == 0.0);
}

TEST_CASE("coefficient thresholding with s = p is the identity") {
  Vector theta(4);
  theta << 1, -2, 0, 4;
  CHECK((hard_threshold_coefficients(theta, 4) - theta).norm() == 0.0);
}

TEST_CASE("coefficient thresholding of zeros is zeros") {
  CHECK(hard_threshold_coefficients(Model::Zero(5), 2).norm() == 0.0);
}

TEST_CASE("coefficient thresholding rejects s outside [1, p]") {
  CHECK_THROWS_AS(hard_threshold_coefficients(Model::Zero(3), 0), BadK);
  CHECK_THROWS_AS(hard_threshold_coefficients(Model::Zero(3), 4), BadK);
}

TEST_CASE("coefficient thresholding is idempotent, ties included") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const Index p = 1 + rng.uniform_index(80);
    const Vector theta = tie_prone_vector(p, rng);
    const Index s = 1 + rng.uniform_index(p);
    const Model once = hard_threshold_coefficients(theta, s);
    const Model twice = hard_threshold_coefficients(once, s);
    CHECK((once - twice).norm() == 0.0);
    CHECK((once - oracles::sort_keep_largest(theta, s)).norm() == 0.0);
  }
}
