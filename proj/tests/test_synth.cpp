#include <doctest.h>

#include <cmath>
#include <vector>

#include "ausyn/cooccur.hpp"
#include "ausyn/dsp.hpp"
#include "ausyn/labeling.hpp"
#include "ausyn/synth.hpp"
#include "ausyn/xcorr.hpp"
#include "helpers.hpp"

using namespace ausyn;

namespace {

std::vector<double> binarize_row(const Eigen::MatrixXd& m, Eigen::Index r,
                                 double level) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.cols(); ++i)
    out[static_cast<std::size_t>(i)] = m(r, i) >= level ? 1.0 : 0.0;
  return out;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("no events means silent sources and an empty log") {
  SynthConfig cfg;
  cfg.duration_s = 10.0;
  cfg.n_events = 0;
  cfg.n_other_bursts = 0;
  auto [sources, log] = generate_envelopes(cfg);
  CHECK(log.empty());
  CHECK(sources.rows() == 3);
  CHECK(sources.cols() == 10000);
  CHECK(sources.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a contained event nests the trapezoids strictly") {
  SynthConfig cfg;
  cfg.duration_s = 20.0;
  cfg.n_events = 1;
  cfg.pattern_script =
      std::vector<CooccurrencePattern>{CooccurrencePattern::kAu12InsideAu6};
  cfg.n_other_bursts = 0;
  cfg.seed = 9;
  auto [sources, log] = generate_envelopes(cfg);
  REQUIRE(log.size() == 1);
  REQUIRE(log[0].au6.has_value());
  REQUIRE(log[0].au12.has_value());
  CHECK(log[0].au6->onset_ms < log[0].au12->onset_ms);
  CHECK(log[0].au12->offset_ms < log[0].au6->offset_ms);
  // Wherever AU12 is up, AU6 is already fully up.
  for (Eigen::Index i = 0; i < sources.cols(); ++i)
    if (sources(1, i) >= 0.5) CHECK(sources(0, i) >= sources(1, i));
}

TEST_CASE("scripted patterns survive the round trip through classification") {
  std::vector<CooccurrencePattern> script{
      CooccurrencePattern::kAu6Only,        CooccurrencePattern::kAu12Only,
      CooccurrencePattern::kAu12InsideAu6,  CooccurrencePattern::kAu6InsideAu12,
      CooccurrencePattern::kAu12BeforeAu6,  CooccurrencePattern::kAu6BeforeAu12,
      CooccurrencePattern::kAu12InsideAu6,  CooccurrencePattern::kAu6Only};
  SynthConfig cfg;
  cfg.duration_s = 90.0;
  cfg.n_events = static_cast<int>(script.size());
  cfg.pattern_script = script;
  cfg.n_other_bursts = 0;
  cfg.seed = 21;
  auto [sources, log] = generate_envelopes(cfg);
  REQUIRE(log.size() == script.size());
  for (std::size_t i = 0; i < script.size(); ++i)
    CHECK(log[i].pattern == script[i]);

  auto t6 = LabelTrack::binary(binarize_row(sources, 0, 0.5), cfg.emg_rate_hz,
                               au::kAu6, Modality::kEmg);
  auto t12 = LabelTrack::binary(binarize_row(sources, 1, 0.5), cfg.emg_rate_hz,
                                au::kAu12, Modality::kEmg);
  auto summary = classify_cooccurrence(t6, t12, Condition::kSpontaneous,
                                       Modality::kEmg);
  std::array<int, kPatternCount> want{};
  for (auto p : script) ++want[static_cast<std::size_t>(p)];
  for (int p = 0; p < kPatternCount; ++p)
    CHECK(summary.counts[static_cast<std::size_t>(p)] ==
          want[static_cast<std::size_t>(p)]);
}

TEST_CASE("the same seed reproduces the session byte for byte") {
  SynthConfig cfg;
  cfg.duration_s = 15.0;
  cfg.n_events = 2;
  cfg.seed = 1234;
  auto a = generate_session(cfg);
  auto b = generate_session(cfg);
  CHECK(a.block.emg.samples() == b.block.emg.samples());
  CHECK(a.true_sources == b.true_sources);
  CHECK(a.true_mixing == b.true_mixing);
  REQUIRE(a.event_log.size() == b.event_log.size());
  for (std::size_t i = 0; i < a.event_log.size(); ++i) {
    CHECK(a.event_log[i].onset_ms == b.event_log[i].onset_ms);
    CHECK(a.event_log[i].offset_ms == b.event_log[i].offset_ms);
  }
  REQUIRE(a.block.cv_tracks.size() == b.block.cv_tracks.size());
  for (std::size_t i = 0; i < a.block.cv_tracks.size(); ++i)
    CHECK(a.block.cv_tracks[i].values == b.block.cv_tracks[i].values);

  SynthConfig other = cfg;
  other.seed = 1235;
  auto c = generate_session(other);
  CHECK(a.block.emg.samples() != c.block.emg.samples());
}

TEST_CASE("a clean session recovers the injected video lead") {
  SynthConfig cfg;
  cfg.duration_s = 30.0;
  cfg.n_events = 4;
  cfg.snr_db = std::numeric_limits<double>::infinity();
  cfg.emg_lead_ms = 374.0;
  Eigen::MatrixXd mixing(4, 3);
  mixing << 1.0, 0.01, 0.01,
            0.01, 1.0, 0.01,
            0.01, 0.01, 1.0,
            0.34, 0.33, 0.33;
  cfg.mixing = mixing;
  cfg.seed = 5;
  auto sess = generate_session(cfg);

  // Channel 2 carries AU12 almost alone; its envelope should lead the CV
  // track by the configured amount, within one video frame.
  auto envs = envelope_emg(bandpass_emg(sess.block.emg));
  std::vector<double> env(envs.samples().row(1).begin(),
                          envs.samples().row(1).end());
  const LabelTrack* cv12 =
      find_track(sess.block.cv_tracks, au::kAu12, TrackKind::kContinuous);
  REQUIRE(cv12 != nullptr);
  auto d = estimate_delay(env, cfg.emg_rate_hz, *cv12, 2.0);
  CHECK(std::abs(d.lag_ms - 374.0) <= 34.0);
}

TEST_CASE("sessions with only one active unit leave the other silent") {
  SynthConfig cfg;
  cfg.duration_s = 40.0;
  cfg.n_events = 4;
  cfg.pattern_script = std::vector<CooccurrencePattern>(
      4, CooccurrencePattern::kAu12Only);
  cfg.n_other_bursts = 0;
  cfg.seed = 13;
  auto sess = generate_session(cfg);
  CHECK(sess.true_sources.row(0).cwiseAbs().maxCoeff() == 0.0);

  const LabelTrack* truth12 =
      find_track(sess.block.truth_tracks, au::kAu12, TrackKind::kBinary);
  REQUIRE(truth12 != nullptr);
  // Every channel envelope tracks AU12 and nothing else.
  auto envs = envelope_emg(bandpass_emg(sess.block.emg));
  for (Eigen::Index c = 0; c < envs.channels(); ++c) {
    std::vector<double> env(envs.samples().row(c).begin(),
                            envs.samples().row(c).end());
    const double r =
        pearson({env.data(), env.size()},
                {truth12->values.data(), truth12->values.size()});
    CHECK(r > 0.5);
  }
}

TEST_CASE("binarized true envelopes match the event log within one sample") {
  SynthConfig cfg;
  cfg.duration_s = 60.0;
  cfg.n_events = 6;
  cfg.n_other_bursts = 0;
  cfg.seed = 30;
  auto sess = generate_session(cfg);
  const double rate = cfg.emg_rate_hz;
  const auto& src = sess.true_sources;

  for (int au_row = 0; au_row < 2; ++au_row) {
    std::vector<std::pair<long, long>> runs;
    bool up = false;
    long start = 0;
    for (Eigen::Index i = 0; i <= src.cols(); ++i) {
      const bool on = i < src.cols() && src(au_row, i) >= 0.5;
      if (on && !up) { up = true; start = i; }
      if (!on && up) { up = false; runs.emplace_back(start, i); }
    }
    std::vector<std::pair<long, long>> expected;
    for (const auto& ev : sess.event_log) {
      const auto& iv = au_row == 0 ? ev.au6 : ev.au12;
      if (!iv) continue;
      expected.emplace_back(std::lround(iv->onset_ms * rate / 1000.0),
                            std::lround(iv->offset_ms * rate / 1000.0));
    }
    REQUIRE(runs.size() == expected.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
      CHECK(std::abs(runs[i].first - expected[i].first) <= 1);
      CHECK(std::abs(runs[i].second - expected[i].second) <= 1);
    }
  }
}

TEST_CASE("realized noise power honors the requested ratio") {
  SynthConfig cfg;
  cfg.duration_s = 30.0;
  cfg.n_events = 3;
  cfg.snr_db = 10.0;
  cfg.seed = 17;
  auto noisy = generate_session(cfg);
  SynthConfig clean_cfg = cfg;
  clean_cfg.snr_db = std::numeric_limits<double>::infinity();
  auto clean = generate_session(clean_cfg);

  // Same seed: the noise-free session shares signal content exactly, so the
  // difference is the injected sensor noise.
  const Eigen::MatrixXd noise =
      noisy.block.emg.samples() - clean.block.emg.samples();
  const double p_signal = clean.block.emg.samples().squaredNorm() /
                          static_cast<double>(clean.block.emg.samples().size());
  const double p_noise =
      noise.squaredNorm() / static_cast<double>(noise.size());
  const double realized_db = 10.0 * std::log10(p_signal / p_noise);
  CHECK(std::abs(realized_db - 10.0) < 0.5);
}

TEST_CASE("mixing overrides are validated") {
  SynthConfig cfg;
  cfg.duration_s = 10.0;
  cfg.n_events = 1;

  Eigen::MatrixXd negative = Eigen::MatrixXd::Ones(4, 3);
  negative(2, 1) = -0.2;
  cfg.mixing = negative;
  CHECK_THROWS_AS(generate_session(cfg), InvalidArgumentError);

  // Identical columns collapse the source space.
  Eigen::MatrixXd collinear(4, 3);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c) collinear(r, c) = r + 1.0;
  cfg.mixing = collinear;
  CHECK_THROWS_AS(generate_session(cfg), InvalidArgumentError);

  Eigen::MatrixXd wide = Eigen::MatrixXd::Ones(2, 3);
  cfg.mixing = wide;
  CHECK_THROWS_AS(generate_session(cfg), InvalidArgumentError);
}

TEST_CASE("scripts that cannot fit the duration are rejected") {
  SynthConfig cfg;
  cfg.duration_s = 5.0;
  cfg.n_events = 10;
  CHECK_THROWS_AS(generate_envelopes(cfg), InvalidArgumentError);
}

TEST_CASE("synergy corpus blocks are non-negative and seeded") {
  SynergyCorpusConfig cfg;
  cfg.k_true = 3;
  cfg.n_blocks = 2;
  cfg.seed = 8;
  auto blocks = generate_synergy_corpus(cfg);
  REQUIRE(blocks.size() == 2);
  for (const auto& b : blocks) {
    CHECK(b.rows() == cfg.n_channels);
    CHECK(b.cols() == cfg.n_samples);
    CHECK(b.minCoeff() >= 0.0);
  }
  auto again = generate_synergy_corpus(cfg);
  CHECK(blocks[0] == again[0]);
  CHECK(blocks[1] == again[1]);
}

}  // TEST_SUITE
