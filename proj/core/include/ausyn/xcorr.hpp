#pragma once

#include <span>

namespace ausyn {

// Pearson correlation over the full overlap of two equal-length series.
// Returns 0 when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

struct LagPeak {
  long lag = 0;          // samples; positive means `a` leads `b`
  double correlation = 0.0;
};

// Scans Pearson-at-lag over [-max_lag, +max_lag] and returns the peak.
// With absolute = true the magnitude |r| is maximized and reported, which
// makes the result invariant to sign flips of either series. Ties prefer
// the smaller |lag|, then the smaller lag. Lags whose overlap has zero
// variance on either side score 0.
LagPeak max_lag_pearson(std::span<const double> a, std::span<const double> b,
                        long max_lag, bool absolute);

}  // namespace ausyn
