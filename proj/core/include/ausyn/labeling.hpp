#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "ausyn/dsp.hpp"
#include "ausyn/ica.hpp"
#include "ausyn/nnmf.hpp"
#include "ausyn/signal.hpp"

namespace ausyn {

// Activity gate: smooth the envelope, take mean and deviation over the
// leading baseline window, mark samples strictly above mean + k * sigma.
struct ThresholdConfig {
  double k_sigma = 2.0;
  double baseline_s = 1.0;
  double sigma_floor = 1e-9;  // keeps a dead-flat baseline from gating at 0
};

std::vector<std::uint8_t> threshold_activity(const std::vector<double>& envelope,
                                             double rate_hz,
                                             const ThresholdConfig& cfg,
                                             const SgConfig& smoothing);

// Which separated component tracks which video-labelled action unit.
// Scores are peak |Pearson| over the lag window, so a component that comes
// out of the separation sign-flipped still matches. The third score column
// is a seeded uniform-noise reference; it never drives the assignment and
// is kept as a sanity floor for the real correlations.
struct ComponentAssignment {
  int au6_component = -1;
  int au12_component = -1;
  int other_component = -1;
  double au6_score = 0.0;
  double au12_score = 0.0;
  Eigen::MatrixXd scores;  // components x {AU6, AU12, noise reference}
  std::uint64_t noise_seed = 0;
};

ComponentAssignment assign_components(const Eigen::MatrixXd& envelopes,
                                      double envelope_rate_hz,
                                      const LabelTrack& cv_au6,
                                      const LabelTrack& cv_au12,
                                      double max_lag_s = 1.0,
                                      std::uint64_t noise_seed = 0);

struct DelayEstimate {
  std::string au;
  long lag_samples = 0;  // positive: the EMG side precedes the video side
  double lag_ms = 0.0;
  double correlation = 0.0;  // |r| at the winning lag
};

// Peak of |Pearson| between an EMG-rate envelope and a video-rate track
// upsampled to match, scanned over +-max_lag_s.
DelayEstimate estimate_delay(const std::vector<double>& envelope,
                             double envelope_rate_hz,
                             const LabelTrack& video_track,
                             double max_lag_s = 2.0);

enum class IcaInput { kBandpassed, kEnvelope };

// Separation defaults to the band-passed signals: their mixture is linear,
// which unmixing assumes. Envelopes mix as a root of summed squares, so
// envelope-domain separation leaves crosstalk; it stays available as an
// alternative input.
struct DetectConfig {
  PreprocessConfig preprocess;
  SgConfig smoothing;
  ThresholdConfig threshold;
  IcaInput ica_input = IcaInput::kBandpassed;
  int n_components = 3;
  double assign_max_lag_s = 1.0;
  double delay_max_lag_s = 2.0;
  std::uint64_t seed = 42;
};

struct DetectionResult {
  IcaResult ica;
  Eigen::MatrixXd component_envelopes;  // n_components x samples
  std::vector<std::vector<std::uint8_t>> component_active;  // per component
  ComponentAssignment assignment;
  LabelTrack au6;   // binary, EMG rate
  LabelTrack au12;  // binary, EMG rate
  std::vector<DelayEstimate> delays;  // AU6 then AU12
};

// Whole detection chain for one block: condition the EMG, separate sources,
// assign components against the continuous video tracks, gate activity, and
// estimate the EMG-to-video delay per assigned unit. The block must carry
// continuous CV tracks for AU6 and AU12.
DetectionResult detect_aus(const Block& block, const DetectConfig& cfg = {});

// Shared-activation check across the gated component tracks: a rank-2
// non-negative factorization of the stacked binary activity. Skipped (not an
// error) when nothing was active.
struct CascadeResult {
  NnmfResult factorization;
  bool skipped = false;
};

CascadeResult cascade_synergies(
    const std::vector<std::vector<std::uint8_t>>& component_active,
    std::uint64_t seed);

}  // namespace ausyn
