#include "torrent/subset_spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <cmath>
#include <limits>

#include "torrent/rng.hpp"

namespace torrent {

namespace {

// C(n, k), saturating at cap + 1.
std::uint64_t combinations_capped(Index n, Index k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double c = 1.0L;
  for (Index i = 1; i <= k; ++i) {
    c = c * static_cast<long double>(n - k + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(c + 0.5L);
}

// Lexicographic advance of a k-combination over [0, n); false when exhausted.
bool next_combination(std::vector<Index>& comb, Index n) {
  const Index k = static_cast<Index>(comb.size());
  Index i = k - 1;
  while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++comb[static_cast<std::size_t>(i)];
  for (Index j = i + 1; j < k; ++j) {
    comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
  return true;
}

struct Extremes {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
};

// Eigenvalue extremes of X_S X_S^T, optionally restricted to s-sparse unit
// directions (minimum/maximum over all size-s principal blocks).
Extremes subset_extremes(const Matrix& x, const std::vector<Index>& subset,
                         std::optional<Index> sparsity) {
  const Index p = x.rows();
  Matrix gram = Matrix::Zero(p, p);
  for (Index j : subset) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(x.col(j));
  }
  gram = gram.selfadjointView<Eigen::Lower>();

  Extremes e;
  if (!sparsity || *sparsity >= p) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    e.lo = es.eigenvalues().minCoeff();
    e.hi = es.eigenvalues().maxCoeff();
    return e;
  }

  const Index s = *sparsity;
  std::vector<Index> support(static_cast<std::size_t>(s));
  for (Index i = 0; i < s; ++i) support[static_cast<std::size_t>(i)] = i;
  Matrix block(s, s);
  do {
    for (Index r = 0; r < s; ++r) {
      for (Index c = 0; c < s; ++c) {
        block(r, c) = gram(support[static_cast<std::size_t>(r)], support[static_cast<std::size_t>(c)]);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(block, Eigen::EigenvaluesOnly);
    e.lo = std::min(e.lo, es.eigenvalues().minCoeff());
    e.hi = std::max(e.hi, es.eigenvalues().maxCoeff());
  } while (next_combination(support, p));
  return e;
}

Index subset_count_from_gamma(double gamma, Index n) {
  const double raw = gamma * static_cast<double>(n);
  const Index k = static_cast<Index>(std::llround(raw));
  if (std::abs(raw - static_cast<double>(k)) > 1e-9) {
    throw BadSpec("estimate_subset_spectrum: gamma * n must be integral");
  }
  if (k < 1 || k > n) {
    throw BadSpec("estimate_subset_spectrum: gamma * n must lie in [1, n]");
  }
  return k;
}

}  // namespace

const char* to_string(ConditionVariant v) {
  switch (v) {
    case ConditionVariant::FC: return "fc";
    case ConditionVariant::GD: return "gd";
    case ConditionVariant::HYB: return "hyb";
    case ConditionVariant::HD: return "hd";
    case ConditionVariant::FCDenseNoise: return "fc_dense_noise";
  }
  return "?";
}

std::string report_json(const SubsetSpectrumReport& r) {
  nlohmann::json j;
  j["gamma"] = r.gamma;
  j["lambda_gamma"] = r.lambda_gamma;
  j["Lambda_gamma"] = r.big_lambda_gamma;
  j["mode"] = r.exact ? "exact" : "sampled";
  if (!r.exact) j["trials"] = r.trials;
  if (r.sparsity_level) {
    j["sparsity_level"] = *r.sparsity_level;
  } else {
    j["sparsity_level"] = nullptr;
  }
  return j.dump();
}

SubsetSpectrumReport estimate_subset_spectrum(const Matrix& x, double gamma,
                                              const SpectrumMode& mode,
                                              std::optional<Index> sparsity) {
  const Index p = x.rows();
  const Index n = x.cols();
  if (p < 1 || n < 1) throw DimensionMismatch("estimate_subset_spectrum: empty matrix");
  if (sparsity && (*sparsity < 1 || *sparsity > p)) {
    throw BadSpec("estimate_subset_spectrum: sparsity must lie in [1, p]");
  }
  const Index k = subset_count_from_gamma(gamma, n);

  SubsetSpectrumReport report;
  report.gamma = gamma;
  report.sparsity_level = sparsity;

  Extremes fold;
  if (std::holds_alternative<ExactMode>(mode)) {
    std::uint64_t budget = combinations_capped(n, k, kExactEnumerationCap);
    if (sparsity && *sparsity < p) {
      const std::uint64_t patterns = combinations_capped(p, *sparsity, kExactEnumerationCap);
      budget = (patterns == 0 || budget > kExactEnumerationCap / patterns)
                   ? kExactEnumerationCap + 1
                   : budget * patterns;
    }
    if (budget > kExactEnumerationCap) {
      throw BudgetExceeded("estimate_subset_spectrum: exact enumeration over budget");
    }
    report.exact = true;
    std::vector<Index> subset(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
    do {
      const Extremes e = subset_extremes(x, subset, sparsity);
      fold.lo = std::min(fold.lo, e.lo);
      fold.hi = std::max(fold.hi, e.hi);
    } while (next_combination(subset, n));
  } else {
    const auto& sampled = std::get<SampledMode>(mode);
    if (sampled.trials < 1) throw BadSpec("estimate_subset_spectrum: trials must be >= 1");
    report.exact = false;
    report.trials = sampled.trials;
    Rng rng(mix_seed(sampled.seed, 0x55BCu));
    for (Index t = 0; t < sampled.trials; ++t) {
      const auto subset = rng.sample_without_replacement(n, k);
      const Extremes e = subset_extremes(x, subset, sparsity);
      fold.lo = std::min(fold.lo, e.lo);
      fold.hi = std::max(fold.hi, e.hi);
    }
  }

  report.lambda_gamma = std::max(0.0, fold.lo);  // Gram spectra are nonnegative
  report.big_lambda_gamma = std::max(0.0, fold.hi);
  return report;
}

namespace {

const SubsetSpectrumReport* find_report(const std::vector<SubsetSpectrumReport>& reports,
                                        double gamma, bool restricted) {
  for (const auto& r : reports) {
    if (std::abs(r.gamma - gamma) <= 1e-9 && r.sparsity_level.has_value() == restricted) {
      return &r;
    }
  }
  return nullptr;
}

struct LevelPair {
  double beta = 0.0;
  const SubsetSpectrumReport* low = nullptr;   // level beta
  const SubsetSpectrumReport* high = nullptr;  // level 1 - beta
};

LevelPair paired_levels(const std::vector<SubsetSpectrumReport>& reports, bool restricted) {
  for (const auto& r : reports) {
    if (r.sparsity_level.has_value() != restricted) continue;
    if (r.gamma > 0.5 + 1e-9) continue;
    if (const auto* other = find_report(reports, 1.0 - r.gamma, restricted)) {
      if (restricted && other->sparsity_level != r.sparsity_level) continue;
      return {r.gamma, &r, other};
    }
  }
  throw MissingReport("check_convergence_condition: need reports at beta and 1 - beta");
}

}  // namespace

ConditionVerdict check_convergence_condition(const std::vector<SubsetSpectrumReport>& reports,
                                             ConditionVariant variant,
                                             std::optional<double> eta) {
  const bool restricted = variant == ConditionVariant::HD;
  const LevelPair pair = paired_levels(reports, restricted);
  const double big_lambda_beta = pair.low->big_lambda_gamma;
  const double lambda_rest = pair.high->lambda_gamma;
  const double big_lambda_rest = pair.high->big_lambda_gamma;

  ConditionVerdict verdict;
  verdict.variant = variant;

  auto gd_predicate = [&](double step) {
    return std::max(step * std::sqrt(big_lambda_beta), 1.0 - step * lambda_rest);
  };

  switch (variant) {
    case ConditionVariant::FC: {
      verdict.predicate_value = (1.0 + std::sqrt(2.0)) * big_lambda_beta / lambda_rest;
      verdict.satisfied = verdict.predicate_value < 1.0;
      verdict.rate_eta = verdict.predicate_value;
      break;
    }
    case ConditionVariant::GD: {
      const double step = eta ? *eta : 1.0 / big_lambda_rest;
      verdict.predicate_value = gd_predicate(step);
      verdict.satisfied = verdict.predicate_value <= 0.25;
      verdict.rate_eta = 3.0 * verdict.predicate_value;
      break;
    }
    case ConditionVariant::HYB: {
      const double fc_rate = (1.0 + std::sqrt(2.0)) * big_lambda_beta / lambda_rest;
      const double step = eta ? *eta : 1.0 / big_lambda_rest;
      const double gd_rate = 3.0 * gd_predicate(step);
      verdict.predicate_value = 2.0 * fc_rate * gd_rate;
      verdict.satisfied = verdict.predicate_value < 1.0;
      verdict.rate_eta = verdict.predicate_value;
      break;
    }
    case ConditionVariant::HD: {
      verdict.predicate_value = 4.0 * big_lambda_beta / lambda_rest;
      verdict.satisfied = verdict.predicate_value < 1.0;
      verdict.rate_eta = verdict.predicate_value;
      break;
    }
    case ConditionVariant::FCDenseNoise: {
      verdict.predicate_value = 4.0 * std::sqrt(big_lambda_beta) / std::sqrt(lambda_rest);
      verdict.satisfied = verdict.predicate_value < 1.0;
      verdict.rate_eta = verdict.predicate_value;
      break;
    }
  }
  if (!std::isfinite(verdict.predicate_value)) verdict.satisfied = false;
  return verdict;
}

}  // namespace torrent
