#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "torrent/common.hpp"

namespace torrent {

struct ExactMode {};
struct SampledMode {
  Index trials = 2000;
  std::uint64_t seed = 0;
};
using SpectrumMode = std::variant<ExactMode, SampledMode>;

// Exact enumeration is capped at this many subsets (times support patterns in
// the restricted variant); beyond it only sampled inner bounds are offered.
inline constexpr std::uint64_t kExactEnumerationCap = 1'000'000;

struct SubsetSpectrumReport {
  double gamma = 0.0;
  // min over size-(gamma n) subsets of the smallest eigenvalue of X_S X_S^T
  // (restricted to s-sparse directions when sparsity_level is set).
  double lambda_gamma = 0.0;
  // max over subsets of the largest eigenvalue, same restriction.
  double big_lambda_gamma = 0.0;
  bool exact = true;
  Index trials = 0;  // sampled mode only
  std::optional<Index> sparsity_level;
};

std::string report_json(const SubsetSpectrumReport& r);

// Subset eigenvalue extremes of X at subset fraction gamma (gamma * n must be
// integral). Exact mode enumerates every subset; sampled mode draws `trials`
// subsets uniformly and returns inner bounds: the reported lambda is an upper
// bound on the true minimum and the reported Lambda a lower bound on the true
// maximum. With a sparsity level s, extremes are taken over s-sparse unit
// directions by support enumeration.
SubsetSpectrumReport estimate_subset_spectrum(const Matrix& x, double gamma,
                                              const SpectrumMode& mode,
                                              std::optional<Index> sparsity = {});

enum class ConditionVariant { FC, GD, HYB, HD, FCDenseNoise };

const char* to_string(ConditionVariant v);

struct ConditionVerdict {
  ConditionVariant variant = ConditionVariant::FC;
  double predicate_value = 0.0;
  bool satisfied = false;
  double rate_eta = 0.0;
};

// Evaluates a variant's convergence predicate from subset-spectrum reports at
// fractions beta and 1 - beta (restricted reports for HD):
//   FC:    (1 + sqrt(2)) Lambda_beta / lambda_{1-beta}          < 1
//   GD:    max{eta sqrt(Lambda_beta), 1 - eta lambda_{1-beta}}  <= 1/4
//          (eta defaults to 1 / Lambda_{1-beta})
//   HYB:   2 eta_fc eta_gd                                      < 1
//   HD:    4 L_(beta,s) / alpha_(1-beta,s)                      < 1
//   FC under dense noise: 4 sqrt(Lambda_beta / lambda_{1-beta}) < 1
// rate_eta is the contraction factor implied by the analysis; for GD this is
// 3x the predicate (3/4 at the boundary), elsewhere the predicate itself.
ConditionVerdict check_convergence_condition(const std::vector<SubsetSpectrumReport>& reports,
                                             ConditionVariant variant,
                                             std::optional<double> eta = {});

}  // namespace torrent
