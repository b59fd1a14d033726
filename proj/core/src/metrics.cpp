#include "ausyn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ausyn {

namespace {

// Midranks of the pooled sample, positional (tied values share one rank).
std::vector<double> pooled_midranks(std::span<const double> a,
                                    std::span<const double> b,
                                    std::vector<double>& ranks_a) {
  struct Item {
    double value;
    bool from_a;
  };
  std::vector<Item> pooled;
  pooled.reserve(a.size() + b.size());
  for (const double v : a) pooled.push_back({v, true});
  for (const double v : b) pooled.push_back({v, false});
  std::stable_sort(pooled.begin(), pooled.end(),
                   [](const Item& x, const Item& y) { return x.value < y.value; });

  const std::size_t n = pooled.size();
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && pooled[j + 1].value == pooled[i].value) ++j;
    const double mid = 0.5 * (static_cast<double>(i + 1) +
                              static_cast<double>(j + 1));
    for (std::size_t t = i; t <= j; ++t) ranks[t] = mid;
    i = j + 1;
  }

  ranks_a.clear();
  std::vector<double> all(n);
  for (std::size_t t = 0; t < n; ++t) {
    all[t] = ranks[t];
    if (pooled[t].from_a) ranks_a.push_back(ranks[t]);
  }
  return all;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Counts the subsets of size `need` whose rank sum deviates from the mean by
// at least `dev`. The pool is at most 12 ranks, so plain recursion is cheap.
void count_extreme(const std::vector<double>& ranks, std::size_t idx,
                   std::size_t need, double sum, double mean, double dev,
                   long& extreme, long& total) {
  if (need == 0) {
    ++total;
    if (std::abs(sum - mean) >= dev - 1e-9) ++extreme;
    return;
  }
  if (ranks.size() - idx < need) return;
  count_extreme(ranks, idx + 1, need - 1, sum + ranks[idx], mean, dev, extreme,
                total);
  count_extreme(ranks, idx + 1, need, sum, mean, dev, extreme, total);
}

}  // namespace

ConfusionCounts confusion_counts(const LabelTrack& pred,
                                 const LabelTrack& truth) {
  validate(pred);
  validate(truth);
  if (pred.kind != TrackKind::kBinary || truth.kind != TrackKind::kBinary) {
    throw InvalidArgumentError("confusion counts need binary tracks");
  }
  if (std::abs(pred.rate_hz - truth.rate_hz) >
      1e-9 * std::max(pred.rate_hz, truth.rate_hz)) {
    throw InvalidArgumentError("confusion counts need equal rates");
  }
  if (pred.values.size() != truth.values.size()) {
    throw InvalidArgumentError("confusion counts need equal lengths");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const bool p = pred.values[i] != 0.0;
    const bool t = truth.values[i] != 0.0;
    if (p && t) ++c.tp;
    else if (p && !t) ++c.fp;
    else if (!p && t) ++c.fn;
    else ++c.tn;
  }
  return c;
}

AgreementReport cohens_kappa(const ConfusionCounts& c) {
  if (c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0) {
    throw InvalidArgumentError("confusion counts must be non-negative");
  }
  const std::int64_t n = c.total();
  if (n < 1) throw InvalidArgumentError("empty confusion table");

  // All in exact integer arithmetic until the final divisions:
  //   p_o = (tp + tn) / n
  //   p_e = ((tp+fp)(tp+fn) + (fn+tn)(fp+tn)) / n^2
  //   kappa = (n (tp+tn) - pe_num) / (n^2 - pe_num)
  const std::int64_t pe_num =
      (c.tp + c.fp) * (c.tp + c.fn) + (c.fn + c.tn) * (c.fp + c.tn);
  const std::int64_t n2 = n * n;
  if (pe_num == n2) {
    throw DegenerateInputError(
        "chance agreement is 1, kappa undefined (both raters constant)");
  }

  AgreementReport r;
  r.n = n;
  r.p_observed = static_cast<double>(c.tp + c.tn) / static_cast<double>(n);
  r.p_expected = static_cast<double>(pe_num) / static_cast<double>(n2);
  r.kappa = static_cast<double>(n * (c.tp + c.tn) - pe_num) /
            static_cast<double>(n2 - pe_num);
  r.accuracy = r.p_observed;
  if (c.tp + c.fp > 0) {
    r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn > 0) {
    r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  return r;
}

RankSumResult wilcoxon_rank_sum(std::span<const double> a,
                                std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw InvalidArgumentError("rank-sum test needs non-empty samples");
  }
  for (const double v : a) {
    if (!std::isfinite(v)) throw InvalidArgumentError("non-finite sample");
  }
  for (const double v : b) {
    if (!std::isfinite(v)) throw InvalidArgumentError("non-finite sample");
  }

  const auto na = static_cast<std::int64_t>(a.size());
  const auto nb = static_cast<std::int64_t>(b.size());
  const std::int64_t n = na + nb;

  std::vector<double> ranks_a;
  const std::vector<double> all_ranks = pooled_midranks(a, b, ranks_a);
  double w = 0.0;
  for (const double r : ranks_a) w += r;

  RankSumResult out;
  out.w = w;
  const double mean = static_cast<double>(na) * (n + 1) / 2.0;
  const double dev = std::abs(w - mean);

  if (n <= 12) {
    // Exact: walk every assignment of n_a ranks out of n.
    std::vector<double> ranks = all_ranks;
    std::sort(ranks.begin(), ranks.end());
    long extreme = 0, total = 0;
    count_extreme(ranks, 0, static_cast<std::size_t>(na), 0.0, mean, dev,
                  extreme, total);
    out.p = static_cast<double>(extreme) / static_cast<double>(total);
    return out;
  }

  // Tie-corrected variance of W.
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < all_ranks.size()) {
    std::size_t j = i;
    while (j + 1 < all_ranks.size() && all_ranks[j + 1] == all_ranks[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double nd = static_cast<double>(n);
  const double var = static_cast<double>(na) * static_cast<double>(nb) / 12.0 *
                     ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
  if (var <= 0.0) {
    out.p = 1.0;  // every observation tied, W is constant
    return out;
  }
  const double z = (dev - 0.5) / std::sqrt(var);  // continuity correction
  out.p = std::min(1.0, 2.0 * normal_sf(std::max(0.0, z)));
  return out;
}

}  // namespace ausyn
