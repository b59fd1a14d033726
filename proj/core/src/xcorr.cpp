#include "ausyn/xcorr.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "ausyn/error.hpp"

namespace ausyn {

namespace {

struct Prefix {
  std::vector<double> sum;
  std::vector<double> sq;
};

Prefix prefix_sums(std::span<const double> x) {
  Prefix p;
  p.sum.assign(x.size() + 1, 0.0);
  p.sq.assign(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    p.sum[i + 1] = p.sum[i] + x[i];
    p.sq[i + 1] = p.sq[i] + x[i] * x[i];
  }
  return p;
}

// Pearson over a[a0, a0+n) vs b[b0, b0+n) using precomputed moments; the
// cross term is the only O(n) piece per lag.
double windowed_pearson(std::span<const double> a, std::span<const double> b,
                        const Prefix& pa, const Prefix& pb, std::int64_t a0,
                        std::int64_t b0, std::int64_t n) {
  if (n < 2) return 0.0;
  const double sa = pa.sum[static_cast<std::size_t>(a0 + n)] -
                    pa.sum[static_cast<std::size_t>(a0)];
  const double sb = pb.sum[static_cast<std::size_t>(b0 + n)] -
                    pb.sum[static_cast<std::size_t>(b0)];
  const double saa = pa.sq[static_cast<std::size_t>(a0 + n)] -
                     pa.sq[static_cast<std::size_t>(a0)];
  const double sbb = pb.sq[static_cast<std::size_t>(b0 + n)] -
                     pb.sq[static_cast<std::size_t>(b0)];
  const double nd = static_cast<double>(n);
  const double var_a = saa - sa * sa / nd;
  const double var_b = sbb - sb * sb / nd;
  if (var_a <= 0.0 || var_b <= 0.0) return 0.0;
  double dot = 0.0;
  const double* ap = a.data() + a0;
  const double* bp = b.data() + b0;
  for (std::int64_t i = 0; i < n; ++i) dot += ap[i] * bp[i];
  const double cov = dot - sa * sb / nd;
  return cov / std::sqrt(var_a * var_b);
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgumentError("pearson needs equal lengths");
  }
  const Prefix pa = prefix_sums(a);
  const Prefix pb = prefix_sums(b);
  return windowed_pearson(a, b, pa, pb, 0, 0,
                          static_cast<std::int64_t>(a.size()));
}

LagPeak max_lag_pearson(std::span<const double> a, std::span<const double> b,
                        long max_lag, bool absolute) {
  if (a.size() != b.size()) {
    throw InvalidArgumentError("lag scan needs equal lengths");
  }
  if (max_lag < 0) {
    throw InvalidArgumentError("lag window must be non-negative");
  }
  const auto n = static_cast<std::int64_t>(a.size());
  if (n < max_lag + 2) {
    throw InvalidArgumentError("series shorter than the lag window");
  }
  const Prefix pa = prefix_sums(a);
  const Prefix pb = prefix_sums(b);

  LagPeak best;
  double best_key = -2.0;
  for (std::int64_t lag = -max_lag; lag <= max_lag; ++lag) {
    // Positive lag: a leads b, so a[0..] pairs with b[lag..].
    const std::int64_t a0 = lag >= 0 ? 0 : -lag;
    const std::int64_t b0 = lag >= 0 ? lag : 0;
    const std::int64_t overlap = n - std::abs(lag);
    double r = windowed_pearson(a, b, pa, pb, a0, b0, overlap);
    if (absolute) r = std::abs(r);
    const bool better =
        r > best_key ||
        (r == best_key && (std::abs(lag) < std::abs(best.lag) ||
                           (std::abs(lag) == std::abs(best.lag) &&
                            lag < best.lag)));
    if (better) {
      best_key = r;
      best.lag = static_cast<long>(lag);
      best.correlation = r;
    }
  }
  return best;
}

}  // namespace ausyn
