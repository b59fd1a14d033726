#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "ausyn/signal.hpp"

namespace ausyn {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
};

struct AgreementReport {
  double kappa = 0.0;
  double accuracy = 0.0;
  double p_observed = 0.0;
  double p_expected = 0.0;
  // Undefined when the corresponding denominator is zero; no silent 0 or 1.
  std::optional<double> precision;
  std::optional<double> recall;
  std::int64_t n = 0;
};

// Sample-wise confusion between two aligned binary tracks (equal rate and
// length). `pred` supplies the positive direction.
ConfusionCounts confusion_counts(const LabelTrack& pred,
                                 const LabelTrack& truth);

// Cohen's kappa and companions. Computed from integer numerators so clean
// fractions come out exact. Throws DegenerateInputError when chance
// agreement is 1 (both raters constant).
AgreementReport cohens_kappa(const ConfusionCounts& counts);

struct RankSumResult {
  double w = 0.0;  // rank sum of the first sample, midranks for ties
  double p = 0.0;  // two-sided
};

// Wilcoxon rank-sum test. Exact enumeration when n_a + n_b <= 12, otherwise
// a normal approximation with tie-corrected variance and continuity
// correction. The two-sided exact p is the probability of a rank sum at
// least as far from its mean as the observed one.
RankSumResult wilcoxon_rank_sum(std::span<const double> a,
                                std::span<const double> b);

}  // namespace ausyn
