#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace torrent {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Data matrices are p x n, column i holding sample x_i. Column-major storage
// keeps per-sample gathers contiguous.
using Model = Vector;

// Strictly increasing sample indices into [0, n).
using ActiveSet = std::vector<Index>;

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BadK : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BadSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingReport : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

bool is_valid_active_set(const ActiveSet& s, Index n);

ActiveSet full_set(Index n);

// Complement of a sorted set within [0, n).
ActiveSet set_complement(const ActiveSet& s, Index n);

// |a \ b| for sorted sets.
Index set_difference_size(const ActiveSet& a, const ActiveSet& b);

Matrix gather_columns(const Matrix& x, const ActiveSet& s);
Vector gather(const Vector& v, const ActiveSet& s);

// ||v_S||_2
double norm_on(const Vector& v, const ActiveSet& s);

}  // namespace torrent
