#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ausyn/cooccur.hpp"
#include "ausyn/signal.hpp"

namespace ausyn {

struct AuInterval {
  double onset_ms = 0.0;
  double offset_ms = 0.0;
};

// One scripted activation event. onset/offset span the whole group; the
// per-AU intervals are the trapezoid half-amplitude crossings, so binarizing
// the true envelope at 0.5 reproduces them to within one sample.
struct SynthEvent {
  CooccurrencePattern pattern = CooccurrencePattern::kAu6Only;
  double onset_ms = 0.0;
  double offset_ms = 0.0;
  std::optional<AuInterval> au6;
  std::optional<AuInterval> au12;
};

struct SynthConfig {
  double duration_s = 90.0;
  double emg_rate_hz = 1000.0;
  double video_rate_hz = 30.0;
  int n_events = 10;
  // Sampling weights over CooccurrencePattern, ignored when a script is set.
  std::array<double, kPatternCount> pattern_weights{1, 1, 1, 1, 1, 1};
  std::optional<std::vector<CooccurrencePattern>> pattern_script;
  // Unrelated facial activity driving the third source. -1 picks
  // n_events / 2 bursts automatically.
  int n_other_bursts = -1;
  double emg_lead_ms = 374.0;  // EMG precedes the video label by this much
  double snr_db = 10.0;        // +infinity disables sensor noise
  std::optional<Eigen::MatrixXd> mixing;  // channels x 3, positive entries
  std::uint64_t seed = 42;
  Condition condition = Condition::kSpontaneous;
  std::string block_id = "synthetic";
};

struct SyntheticSession {
  Block block;
  Eigen::MatrixXd true_sources;  // 3 x N envelopes: AU6, AU12, OTHER
  Eigen::MatrixXd true_mixing;   // channels x 3
  std::vector<SynthEvent> event_log;
};

// Trapezoidal activation envelopes (200 ms rise and fall, unit amplitude)
// for the three sources, plus the event log. Events are packed sequentially
// with clean margins at both ends; a script that does not fit the duration
// is an error.
std::pair<Eigen::MatrixXd, std::vector<SynthEvent>> generate_envelopes(
    const SynthConfig& cfg);

// Full session: envelopes modulate band-limited noise carriers, a positive
// mixing matrix (min singular value >= 0.2) maps them onto the EMG channels,
// white sensor noise realizes snr_db, and the video-side tracks are delayed
// by emg_lead_ms, sampled at the video rate, and lightly corrupted. Fixed
// seeds reproduce every byte.
SyntheticSession generate_session(const SynthConfig& cfg);

struct SynergyCorpusConfig {
  int k_true = 4;
  int n_blocks = 2;
  int n_channels = 16;
  int n_samples = 900;
  double noise_std = 0.02;
  std::uint64_t seed = 0;
};

// Non-negative blocks with a known number of generating synergies: weight
// columns on near-disjoint channel groups, burst-like activations with
// balanced energy. Dropping any one synergy loses well over the usual
// residual tolerance, which pins the detectable count at k_true.
std::vector<Eigen::MatrixXd> generate_synergy_corpus(
    const SynergyCorpusConfig& cfg);

}  // namespace ausyn
