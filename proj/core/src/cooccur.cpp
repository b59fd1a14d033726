#include "ausyn/cooccur.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "ausyn/xcorr.hpp"

namespace ausyn {

namespace {

struct Run {
  std::int64_t begin = 0;  // half-open sample interval
  std::int64_t end = 0;
  bool is_au12 = false;
};

std::vector<Run> extract_runs(const std::vector<double>& values,
                              bool is_au12) {
  std::vector<Run> runs;
  const auto n = static_cast<std::int64_t>(values.size());
  std::int64_t i = 0;
  while (i < n) {
    if (values[static_cast<std::size_t>(i)] != 0.0) {
      std::int64_t j = i;
      while (j < n && values[static_cast<std::size_t>(j)] != 0.0) ++j;
      runs.push_back({i, j, is_au12});
      i = j;
    } else {
      ++i;
    }
  }
  return runs;
}

void check_aligned_binary(const LabelTrack& a, const LabelTrack& b,
                          const char* what) {
  validate(a);
  validate(b);
  if (a.kind != TrackKind::kBinary || b.kind != TrackKind::kBinary) {
    throw InvalidArgumentError(std::string(what) + " needs binary tracks");
  }
  if (std::abs(a.rate_hz - b.rate_hz) >
      1e-9 * std::max(a.rate_hz, b.rate_hz)) {
    throw InvalidArgumentError(std::string(what) + " needs equal rates");
  }
  if (a.values.size() != b.values.size()) {
    throw InvalidArgumentError(std::string(what) + " needs equal lengths");
  }
}

}  // namespace

std::string to_string(CooccurrencePattern p) {
  switch (p) {
    case CooccurrencePattern::kAu6Only:
      return "AU6_ONLY";
    case CooccurrencePattern::kAu12Only:
      return "AU12_ONLY";
    case CooccurrencePattern::kAu12InsideAu6:
      return "AU12_INSIDE_AU6";
    case CooccurrencePattern::kAu6InsideAu12:
      return "AU6_INSIDE_AU12";
    case CooccurrencePattern::kAu12BeforeAu6:
      return "AU12_BEFORE_AU6";
    case CooccurrencePattern::kAu6BeforeAu12:
      return "AU6_BEFORE_AU12";
  }
  throw InvalidArgumentError("unknown co-occurrence pattern");
}

CooccurrencePattern pattern_from_string(std::string_view s) {
  for (int i = 0; i < kPatternCount; ++i) {
    const auto p = static_cast<CooccurrencePattern>(i);
    if (to_string(p) == s) return p;
  }
  throw InvalidArgumentError("unknown co-occurrence pattern: " +
                             std::string(s));
}

CooccurrenceSummary classify_cooccurrence(const LabelTrack& au6,
                                          const LabelTrack& au12,
                                          Condition condition,
                                          Modality modality) {
  check_aligned_binary(au6, au12, "co-occurrence");

  std::vector<Run> runs = extract_runs(au6.values, false);
  const std::vector<Run> runs12 = extract_runs(au12.values, true);
  runs.insert(runs.end(), runs12.begin(), runs12.end());
  std::sort(runs.begin(), runs.end(), [](const Run& a, const Run& b) {
    return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
  });

  CooccurrenceSummary summary;
  summary.condition = condition;
  summary.modality = modality;

  std::size_t i = 0;
  while (i < runs.size()) {
    // Grow the group while the next run overlaps the union so far.
    std::int64_t group_end = runs[i].end;
    std::size_t j = i + 1;
    while (j < runs.size() && runs[j].begin < group_end) {
      group_end = std::max(group_end, runs[j].end);
      ++j;
    }

    bool has6 = false, has12 = false;
    std::int64_t b6 = 0, e6 = 0, b12 = 0, e12 = 0;
    for (std::size_t t = i; t < j; ++t) {
      const Run& r = runs[t];
      if (r.is_au12) {
        b12 = has12 ? std::min(b12, r.begin) : r.begin;
        e12 = has12 ? std::max(e12, r.end) : r.end;
        has12 = true;
      } else {
        b6 = has6 ? std::min(b6, r.begin) : r.begin;
        e6 = has6 ? std::max(e6, r.end) : r.end;
        has6 = true;
      }
    }

    CooccurrencePattern pattern;
    if (has6 && !has12) {
      pattern = CooccurrencePattern::kAu6Only;
    } else if (!has6 && has12) {
      pattern = CooccurrencePattern::kAu12Only;
    } else {
      const bool six_contains_twelve = b6 <= b12 && e12 <= e6;
      const bool twelve_contains_six = b12 <= b6 && e6 <= e12;
      if (six_contains_twelve && twelve_contains_six) {
        pattern = CooccurrencePattern::kAu12InsideAu6;  // identical spans
        ++summary.ties;
      } else if (six_contains_twelve) {
        pattern = CooccurrencePattern::kAu12InsideAu6;
      } else if (twelve_contains_six) {
        pattern = CooccurrencePattern::kAu6InsideAu12;
      } else if (b6 < b12) {
        pattern = CooccurrencePattern::kAu6BeforeAu12;
      } else {
        pattern = CooccurrencePattern::kAu12BeforeAu6;
      }
    }
    ++summary.counts[static_cast<std::size_t>(pattern)];
    i = j;
  }
  return summary;
}

OnsetProfile onset_aligned_profile(const LabelTrack& au6,
                                   const LabelTrack& au12, double pre_s,
                                   double dur_s) {
  check_aligned_binary(au6, au12, "onset profile");
  if (!(pre_s >= 0.0) || !(dur_s >= 0.0) || pre_s + dur_s <= 0.0) {
    throw InvalidArgumentError("profile window must have positive extent");
  }

  const double rate = au12.rate_hz;
  const auto pre = static_cast<std::int64_t>(std::llround(pre_s * rate));
  const auto dur = static_cast<std::int64_t>(std::llround(dur_s * rate));
  const std::int64_t len = pre + dur + 1;
  const auto n = static_cast<std::int64_t>(au12.values.size());

  OnsetProfile profile;
  profile.pre_s = pre_s;
  profile.dur_s = dur_s;
  profile.rate_hz = rate;
  profile.probabilities.assign(static_cast<std::size_t>(len), 0.0);

  std::vector<double> hits(static_cast<std::size_t>(len), 0.0);
  std::vector<std::int64_t> covered(static_cast<std::size_t>(len), 0);
  for (std::int64_t s = 0; s < n; ++s) {
    const bool rising =
        au12.values[static_cast<std::size_t>(s)] != 0.0 &&
        (s == 0 || au12.values[static_cast<std::size_t>(s - 1)] == 0.0);
    if (!rising) continue;
    ++profile.n_events;
    for (std::int64_t o = 0; o < len; ++o) {
      const std::int64_t idx = s - pre + o;
      if (idx < 0 || idx >= n) continue;  // truncated by the track bounds
      ++covered[static_cast<std::size_t>(o)];
      hits[static_cast<std::size_t>(o)] +=
          au6.values[static_cast<std::size_t>(idx)] != 0.0 ? 1.0 : 0.0;
    }
  }
  for (std::int64_t o = 0; o < len; ++o) {
    if (covered[static_cast<std::size_t>(o)] > 0) {
      profile.probabilities[static_cast<std::size_t>(o)] =
          hits[static_cast<std::size_t>(o)] /
          static_cast<double>(covered[static_cast<std::size_t>(o)]);
    }
  }
  return profile;
}

namespace {

// Greedy best-first pairing over a score matrix; ties pick the smallest
// (row, column) pair so results do not depend on traversal order.
std::vector<std::pair<int, int>> greedy_pairs(const Eigen::MatrixXd& scores) {
  const auto rows = static_cast<int>(scores.rows());
  const auto cols = static_cast<int>(scores.cols());
  const int n_pairs = std::min(rows, cols);
  std::vector<bool> row_used(static_cast<std::size_t>(rows), false);
  std::vector<bool> col_used(static_cast<std::size_t>(cols), false);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n_pairs));
  for (int pick = 0; pick < n_pairs; ++pick) {
    int best_r = -1, best_c = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < rows; ++r) {
      if (row_used[static_cast<std::size_t>(r)]) continue;
      for (int c = 0; c < cols; ++c) {
        if (col_used[static_cast<std::size_t>(c)]) continue;
        if (scores(r, c) > best) {
          best = scores(r, c);
          best_r = r;
          best_c = c;
        }
      }
    }
    row_used[static_cast<std::size_t>(best_r)] = true;
    col_used[static_cast<std::size_t>(best_c)] = true;
    pairs.emplace_back(best_r, best_c);
  }
  return pairs;
}

}  // namespace

SynergyMatch temporal_match(const Eigen::MatrixXd& activations_a,
                            const Eigen::MatrixXd& activations_b,
                            double rate_hz, double max_lag_s) {
  if (activations_a.cols() != activations_b.cols()) {
    throw InvalidArgumentError("activation lengths differ");
  }
  if (!(rate_hz > 0.0) || !(max_lag_s >= 0.0)) {
    throw InvalidArgumentError("bad rate or lag window");
  }
  auto check_rows = [](const Eigen::MatrixXd& m, const char* side) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double var =
          (m.row(r).array() - m.row(r).mean()).square().sum();
      if (!(var > 0.0)) {
        throw DegenerateInputError(std::string("zero-variance activation row "
                                                "on the ") +
                                   side + " side");
      }
    }
  };
  check_rows(activations_a, "first");
  check_rows(activations_b, "second");

  const auto max_lag =
      static_cast<long>(std::llround(max_lag_s * rate_hz));
  SynergyMatch match;
  match.method = "temporal";
  match.scores.resize(activations_a.rows(), activations_b.rows());
  std::vector<double> row_a, row_b;
  for (Eigen::Index i = 0; i < activations_a.rows(); ++i) {
    row_a.assign(activations_a.row(i).begin(), activations_a.row(i).end());
    for (Eigen::Index j = 0; j < activations_b.rows(); ++j) {
      row_b.assign(activations_b.row(j).begin(), activations_b.row(j).end());
      match.scores(i, j) =
          max_lag_pearson(row_a, row_b, max_lag, false).correlation;
    }
  }
  match.pairing = greedy_pairs(match.scores);
  return match;
}

SynergyMatch spatial_match(const Eigen::MatrixXd& weights_a,
                           const Eigen::MatrixXd& weights_b) {
  if (weights_a.rows() != weights_b.rows()) {
    throw InvalidArgumentError("weight matrices need equal row counts");
  }
  auto check_cols = [](const Eigen::MatrixXd& m, const char* side) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!(m.col(c).norm() > 0.0)) {
        throw DegenerateInputError(
            std::string("zero weight column on the ") + side + " side");
      }
    }
  };
  check_cols(weights_a, "first");
  check_cols(weights_b, "second");

  SynergyMatch match;
  match.method = "spatial";
  match.scores.resize(weights_a.cols(), weights_b.cols());
  for (Eigen::Index i = 0; i < weights_a.cols(); ++i) {
    for (Eigen::Index j = 0; j < weights_b.cols(); ++j) {
      match.scores(i, j) = weights_a.col(i).dot(weights_b.col(j)) /
                           (weights_a.col(i).norm() * weights_b.col(j).norm());
    }
  }
  match.pairing = greedy_pairs(match.scores);
  return match;
}

}  // namespace ausyn
