#include "torrent/common.hpp"

#include <algorithm>
#include <cmath>

namespace torrent {

bool is_valid_active_set(const ActiveSet& s, Index n) {
  if (s.empty() || static_cast<Index>(s.size()) > n) return false;
  Index prev = -1;
  for (Index i : s) {
    if (i <= prev || i >= n) return false;
    prev = i;
  }
  return true;
}

ActiveSet full_set(Index n) {
  ActiveSet s(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = i;
  return s;
}

ActiveSet set_complement(const ActiveSet& s, Index n) {
  ActiveSet out;
  out.reserve(static_cast<std::size_t>(n) - s.size());
  std::size_t j = 0;
  for (Index i = 0; i < n; ++i) {
    if (j < s.size() && s[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

Index set_difference_size(const ActiveSet& a, const ActiveSet& b) {
  Index count = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size()) {
    if (j == b.size() || a[i] < b[j]) {
      ++count;
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return count;
}

Matrix gather_columns(const Matrix& x, const ActiveSet& s) {
  Matrix out(x.rows(), static_cast<Index>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) {
    out.col(static_cast<Index>(j)) = x.col(s[j]);
  }
  return out;
}

Vector gather(const Vector& v, const ActiveSet& s) {
  Vector out(static_cast<Index>(s.size()));
  for (std::size_t j = 0; j < s.size(); ++j) {
    out[static_cast<Index>(j)] = v[s[j]];
  }
  return out;
}

double norm_on(const Vector& v, const ActiveSet& s) {
  double acc = 0.0;
  for (Index i : s) acc += v[i] * v[i];
  return std::sqrt(acc);
}

}  // namespace torrent
