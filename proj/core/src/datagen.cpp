#include "torrent/datagen.hpp"

#include <Eigen/Cholesky>

#include <cmath>

#include "torrent/rng.hpp"

namespace torrent {

namespace {

// Sub-stream tags; every generated component owns one so knob sweeps stay
// controlled.
enum SeedTag : std::uint64_t {
  kSeedModel = 1,
  kSeedDesign = 2,
  kSeedSupport = 3,
  kSeedCorruption = 4,
  kSeedNoise = 5,
  kSeedCovariance = 6,
  kSeedShiftModel = 7,
};

Model random_unit_model(Index p, std::optional<Index> sparsity, Rng& rng) {
  Model w = Model::Zero(p);
  if (sparsity) {
    const auto support = rng.sample_without_replacement(p, *sparsity);
    for (Index i : support) w[i] = rng.gaussian();
  } else {
    for (Index i = 0; i < p; ++i) w[i] = rng.gaussian();
  }
  const double norm = w.norm();
  if (norm == 0.0) {
    w[0] = 1.0;  // measure-zero draw; keep the contract of a unit vector
    return w;
  }
  return w / norm;
}

}  // namespace

const char* to_string(AdversaryKind a) {
  return a == AdversaryKind::UniformOblivious ? "uniform_oblivious" : "adaptive_model_shift";
}

Covariance Covariance::diagonal_uniform(double lo, double hi) {
  Covariance c;
  c.kind = Kind::DiagonalUniform;
  c.low = lo;
  c.high = hi;
  return c;
}

Covariance Covariance::explicit_matrix(Matrix s) {
  Covariance c;
  c.kind = Kind::Explicit;
  c.sigma = std::move(s);
  return c;
}

void validate(const InstanceSpec& spec) {
  if (spec.p < 1 || spec.n < 1) throw BadSpec("instance needs p >= 1 and n >= 1");
  if (spec.sparsity_s_star && (*spec.sparsity_s_star < 1 || *spec.sparsity_s_star > spec.p)) {
    throw BadSpec("sparsity_s_star must lie in [1, p]");
  }
  if (!(spec.sigma >= 0.0)) throw BadSpec("sigma must be non-negative");
  // Half the responses consistent with another model is only meaningful for
  // the adaptive adversary; the oblivious one stays strictly below 1/2.
  const double alpha_cap = spec.adversary == AdversaryKind::AdaptiveModelShift ? 0.5 : 0.5 - 1e-12;
  if (!(spec.alpha >= 0.0 && spec.alpha <= alpha_cap)) {
    throw BadSpec("alpha must lie in [0, 0.5), or [0, 0.5] for the adaptive adversary");
  }
  if (!(spec.corruption_scale > 0.0)) throw BadSpec("corruption scale must be positive");
  if (spec.theta_tilde && spec.theta_tilde->size() != spec.p) {
    throw BadSpec("theta_tilde must have length p");
  }
  switch (spec.covariance.kind) {
    case Covariance::Kind::Identity:
      break;
    case Covariance::Kind::DiagonalUniform:
      if (!(spec.covariance.low >= 0.0) || !(spec.covariance.high > spec.covariance.low)) {
        throw BadSpec("diagonal covariance range must satisfy 0 <= low < high");
      }
      break;
    case Covariance::Kind::Explicit:
      if (spec.covariance.sigma.rows() != spec.p || spec.covariance.sigma.cols() != spec.p) {
        throw BadSpec("explicit covariance must be p x p");
      }
      break;
  }
}

Vector adaptive_corruptions(const Matrix& x, const Model& w_star,
                            const Model& theta_tilde, const ActiveSet& support) {
  if (x.rows() != w_star.size() || x.rows() != theta_tilde.size()) {
    throw DimensionMismatch("adaptive_corruptions: model lengths disagree");
  }
  const Model shift = theta_tilde - w_star;
  Vector b = Vector::Zero(x.cols());
  for (Index i : support) b[i] = x.col(i).dot(shift);
  return b;
}

Vector adaptive_adversary(const Matrix& x, const Model& w_star,
                          const Model& theta_tilde, double alpha, std::uint64_t seed) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) {
    throw BadSpec("adaptive_adversary: alpha must lie in [0, 0.5]");
  }
  const Index n = x.cols();
  const Index count = static_cast<Index>(std::floor(alpha * static_cast<double>(n) + 1e-9));
  if (count == 0) return Vector::Zero(n);
  Rng rng(mix_seed(seed, kSeedSupport));
  return adaptive_corruptions(x, w_star, theta_tilde, rng.sample_without_replacement(n, count));
}

RegressionInstance gen_instance(const InstanceSpec& spec) {
  validate(spec);
  const Index p = spec.p;
  const Index n = spec.n;

  RegressionInstance inst;

  {
    Rng rng(mix_seed(spec.seed, kSeedModel));
    inst.w_star = random_unit_model(p, spec.sparsity_s_star, rng);
  }

  inst.x.resize(p, n);
  {
    Rng rng(mix_seed(spec.seed, kSeedDesign));
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < p; ++i) inst.x(i, j) = rng.gaussian();
    }
    switch (spec.covariance.kind) {
      case Covariance::Kind::Identity:
        break;
      case Covariance::Kind::DiagonalUniform: {
        Rng cov_rng(mix_seed(spec.seed, kSeedCovariance));
        Vector scale(p);
        for (Index i = 0; i < p; ++i) {
          scale[i] = std::sqrt(cov_rng.uniform(spec.covariance.low, spec.covariance.high));
        }
        inst.x.array().colwise() *= scale.array();
        break;
      }
      case Covariance::Kind::Explicit: {
        Eigen::LLT<Matrix> llt(spec.covariance.sigma);
        if (llt.info() != Eigen::Success) {
          throw BadSpec("explicit covariance must be positive definite");
        }
        inst.x = llt.matrixL() * inst.x;
        break;
      }
    }
  }

  const Vector y_clean = inst.x.transpose() * inst.w_star;

  const Index corrupted = static_cast<Index>(std::floor(spec.alpha * static_cast<double>(n) + 1e-9));
  ActiveSet support;
  if (corrupted > 0) {
    Rng rng(mix_seed(spec.seed, kSeedSupport));
    support = rng.sample_without_replacement(n, corrupted);
  }

  inst.b = Vector::Zero(n);
  if (corrupted > 0) {
    if (spec.adversary == AdversaryKind::UniformOblivious) {
      const double bound = spec.corruption_scale * y_clean.cwiseAbs().maxCoeff();
      Rng rng(mix_seed(spec.seed, kSeedCorruption));
      for (Index i : support) inst.b[i] = rng.uniform(-bound, bound);
    } else {
      Model tilde;
      if (spec.theta_tilde) {
        tilde = *spec.theta_tilde;
      } else {
        Rng rng(mix_seed(spec.seed, kSeedShiftModel));
        tilde = random_unit_model(p, std::nullopt, rng);
      }
      inst.b = adaptive_corruptions(inst.x, inst.w_star, tilde, support);
    }
  }

  inst.eps = Vector::Zero(n);
  {
    Rng rng(mix_seed(spec.seed, kSeedNoise));
    for (Index i = 0; i < n; ++i) inst.eps[i] = spec.sigma * rng.gaussian();
  }

  inst.y = y_clean + inst.b + inst.eps;
  inst.clean_set = set_complement(support, n);
  return inst;
}

}  // namespace torrent
