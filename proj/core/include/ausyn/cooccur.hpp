#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ausyn/signal.hpp"

namespace ausyn {

// Temporal relation of AU6 and AU12 within one co-occurrence group. "Inside"
// means span containment; "before" means overlap without containment, named
// after the earlier onset.
enum class CooccurrencePattern {
  kAu6Only = 0,
  kAu12Only = 1,
  kAu12InsideAu6 = 2,
  kAu6InsideAu12 = 3,
  kAu12BeforeAu6 = 4,
  kAu6BeforeAu12 = 5,
};
inline constexpr int kPatternCount = 6;

std::string to_string(CooccurrencePattern p);
CooccurrencePattern pattern_from_string(std::string_view s);

struct CooccurrenceSummary {
  std::array<int, kPatternCount> counts{};  // indexed by CooccurrencePattern
  // Events whose spans were identical; counted under kAu12InsideAu6.
  int ties = 0;
  Condition condition = Condition::kSpontaneous;
  Modality modality = Modality::kEmg;

  int total_events() const {
    int t = 0;
    for (const int c : counts) t += c;
    return t;
  }
};

// Groups active runs of both tracks by transitive temporal overlap and
// classifies each group. Tracks must be binary, aligned, equal rate.
CooccurrenceSummary classify_cooccurrence(const LabelTrack& au6,
                                          const LabelTrack& au12,
                                          Condition condition,
                                          Modality modality);

struct OnsetProfile {
  std::vector<double> probabilities;  // index 0 sits at -pre_s
  double pre_s = 0.0;
  double dur_s = 0.0;
  double rate_hz = 0.0;
  int n_events = 0;
};

// Mean AU6 activity around every AU12 rising edge. Window offsets truncated
// by the track bounds are averaged over the events that do cover them.
OnsetProfile onset_aligned_profile(const LabelTrack& au6,
                                   const LabelTrack& au12, double pre_s = 0.5,
                                   double dur_s = 1.0);

struct SynergyMatch {
  // Greedy pairing (first index, second index), in pick order: each pair has
  // the best score among the rows/columns still unmatched.
  std::vector<std::pair<int, int>> pairing;
  Eigen::MatrixXd scores;
  std::string method;
};

// Pairs activation rows by peak Pearson correlation over +-max_lag_s.
// Rows with zero variance are rejected as degenerate.
SynergyMatch temporal_match(const Eigen::MatrixXd& activations_a,
                            const Eigen::MatrixXd& activations_b,
                            double rate_hz, double max_lag_s = 1.0);

// Pairs weight columns by cosine similarity. Requires equal row counts;
// zero columns are rejected as degenerate.
SynergyMatch spatial_match(const Eigen::MatrixXd& weights_a,
                           const Eigen::MatrixXd& weights_b);

}  // namespace ausyn
