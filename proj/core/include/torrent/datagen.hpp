#pragma once

#include <cstdint>
#include <optional>

#include "torrent/common.hpp"

namespace torrent {

enum class AdversaryKind { UniformOblivious, AdaptiveModelShift };

const char* to_string(AdversaryKind a);

// Sample covariance of the design columns.
struct Covariance {
  enum class Kind { Identity, DiagonalUniform, Explicit };
  Kind kind = Kind::Identity;
  double low = 0.0;   // DiagonalUniform
  double high = 1.0;  // DiagonalUniform
  Matrix sigma;       // Explicit

  static Covariance identity() { return {}; }
  static Covariance diagonal_uniform(double lo, double hi);
  static Covariance explicit_matrix(Matrix s);
};

struct InstanceSpec {
  Index p = 1;
  Index n = 1;
  std::optional<Index> sparsity_s_star;
  double sigma = 0.0;  // dense-noise std
  double alpha = 0.0;  // corrupted fraction; floor(alpha * n) entries
  double corruption_scale = 5.0;
  AdversaryKind adversary = AdversaryKind::UniformOblivious;
  // Shift target for the adaptive adversary; drawn as a random unit vector
  // when unset.
  std::optional<Model> theta_tilde;
  Covariance covariance;
  std::uint64_t seed = 0;
};

struct RegressionInstance {
  Matrix x;       // p x n design, columns are samples
  Vector y;       // responses, y = X^T w* + b + eps
  Model w_star;   // unit-norm ground truth
  Vector b;       // sparse corruptions
  Vector eps;     // dense noise
  ActiveSet clean_set;  // complement of supp(b)
};

void validate(const InstanceSpec& spec);

// Seeded synthetic instance: unit-norm model, Gaussian design, uniform
// corruption support with either oblivious uniform values or the adaptive
// model-shift values, and N(0, sigma^2) dense noise. Every component draws
// from its own sub-seed, so sweeping one knob leaves the others' draws fixed.
RegressionInstance gen_instance(const InstanceSpec& spec);

// Corruptions b_i = x_i^T (theta_tilde - w_star) on the given support.
Vector adaptive_corruptions(const Matrix& x, const Model& w_star,
                            const Model& theta_tilde, const ActiveSet& support);

// Adaptive adversary with a seeded uniform floor(alpha * n)-subset support:
// corrupts after observing X and w_star, making the corrupted responses
// exactly consistent with theta_tilde.
Vector adaptive_adversary(const Matrix& x, const Model& w_star,
                          const Model& theta_tilde, double alpha, std::uint64_t seed);

}  // namespace torrent
