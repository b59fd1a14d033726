#include "ausyn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ausyn/dsp.hpp"
#include "ausyn/error.hpp"
#include "ausyn/rng.hpp"

namespace ausyn {
namespace {

constexpr double kRampMs = 200.0;   // trapezoid rise and fall time
constexpr double kHalfRampMs = 100.0;

// Trapezoid with half-amplitude crossings exactly at onset and offset.
double trapezoid(double t_ms, const AuInterval& iv) {
  const double rising = (t_ms - (iv.onset_ms - kHalfRampMs)) / kRampMs;
  const double falling = ((iv.offset_ms + kHalfRampMs) - t_ms) / kRampMs;
  return std::max(0.0, std::min({1.0, rising, falling}));
}

double eval_envelope(const std::vector<AuInterval>& ivs, double t_ms) {
  double v = 0.0;
  for (const auto& iv : ivs) v = std::max(v, trapezoid(t_ms, iv));
  return v;
}

// Relative event layout, onsets/offsets in ms from the event start.
struct EventShape {
  AuInterval au6;
  AuInterval au12;
  bool has6 = false;
  bool has12 = false;
  double span_ms = 0.0;
};

EventShape draw_shape(CooccurrencePattern p, Rng& rng) {
  auto dur = [&rng](int lo, int hi) {
    return static_cast<double>(rng.uniform_int(lo, hi));
  };
  EventShape s;
  switch (p) {
    case CooccurrencePattern::kAu6Only: {
      s.has6 = true;
      s.au6 = {0.0, dur(1200, 2600)};
      s.span_ms = s.au6.offset_ms;
      break;
    }
    case CooccurrencePattern::kAu12Only: {
      s.has12 = true;
      s.au12 = {0.0, dur(1200, 2600)};
      s.span_ms = s.au12.offset_ms;
      break;
    }
    case CooccurrencePattern::kAu12InsideAu6: {
      s.has6 = s.has12 = true;
      const double d6 = dur(2200, 3200);
      const double lead = dur(300, 600);
      const double tail = dur(300, 600);
      s.au6 = {0.0, d6};
      s.au12 = {lead, d6 - tail};
      s.span_ms = d6;
      break;
    }
    case CooccurrencePattern::kAu6InsideAu12: {
      s.has6 = s.has12 = true;
      const double d12 = dur(2200, 3200);
      const double lead = dur(300, 600);
      const double tail = dur(300, 600);
      s.au12 = {0.0, d12};
      s.au6 = {lead, d12 - tail};
      s.span_ms = d12;
      break;
    }
    case CooccurrencePattern::kAu12BeforeAu6: {
      s.has6 = s.has12 = true;
      const double d12 = dur(1500, 2500);
      const double overlap = dur(400, 800);
      const double tail = dur(300, 600);
      s.au12 = {0.0, d12};
      s.au6 = {d12 - overlap, d12 + tail};
      s.span_ms = s.au6.offset_ms;
      break;
    }
    case CooccurrencePattern::kAu6BeforeAu12: {
      s.has6 = s.has12 = true;
      const double d6 = dur(1500, 2500);
      const double overlap = dur(400, 800);
      const double tail = dur(300, 600);
      s.au6 = {0.0, d6};
      s.au12 = {d6 - overlap, d6 + tail};
      s.span_ms = s.au12.offset_ms;
      break;
    }
    default:
      throw InvalidArgumentError("unknown co-occurrence pattern");
  }
  return s;
}

CooccurrencePattern sample_pattern(
    const std::array<double, kPatternCount>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw InvalidArgumentError("pattern weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0)
    throw InvalidArgumentError("pattern weights must not all be zero");
  const double x = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (x < acc) return static_cast<CooccurrencePattern>(i);
  }
  return static_cast<CooccurrencePattern>(kPatternCount - 1);
}

void validate(const SynthConfig& cfg) {
  if (!(cfg.duration_s > 0.0) || !std::isfinite(cfg.duration_s))
    throw InvalidArgumentError("duration must be positive");
  if (!(cfg.emg_rate_hz > 0.0) || !(cfg.video_rate_hz > 0.0))
    throw InvalidArgumentError("sampling rates must be positive");
  if (cfg.n_events < 0) throw InvalidArgumentError("n_events must be >= 0");
  if (cfg.emg_lead_ms < 0.0 || !std::isfinite(cfg.emg_lead_ms))
    throw InvalidArgumentError("emg_lead_ms must be finite and >= 0");
  if (std::isnan(cfg.snr_db))
    throw InvalidArgumentError("snr_db must not be NaN");
}

}  // namespace

std::pair<Eigen::MatrixXd, std::vector<SynthEvent>> generate_envelopes(
    const SynthConfig& cfg) {
  validate(cfg);
  const double duration_ms = cfg.duration_s * 1000.0;
  const auto n = static_cast<Eigen::Index>(
      std::llround(cfg.duration_s * cfg.emg_rate_hz));
  if (n < 2) throw InvalidArgumentError("session too short");

  Rng ev_rng(derive_seed(cfg.seed, "events"));
  std::vector<CooccurrencePattern> patterns;
  if (cfg.pattern_script) {
    patterns = *cfg.pattern_script;
  } else {
    patterns.reserve(static_cast<std::size_t>(cfg.n_events));
    for (int i = 0; i < cfg.n_events; ++i)
      patterns.push_back(sample_pattern(cfg.pattern_weights, ev_rng));
  }

  // Pack events left to right with 2 s clear at both ends.
  const double end_margin_ms = duration_ms - 2000.0;
  double cursor = 2000.0;
  std::vector<SynthEvent> log;
  std::vector<AuInterval> iv6, iv12, ivo;
  for (const auto p : patterns) {
    const EventShape shape = draw_shape(p, ev_rng);
    if (cursor + shape.span_ms > end_margin_ms)
      throw InvalidArgumentError("events do not fit in the session duration");
    SynthEvent e;
    e.pattern = p;
    e.onset_ms = cursor;
    e.offset_ms = cursor + shape.span_ms;
    if (shape.has6) {
      e.au6 = AuInterval{shape.au6.onset_ms + cursor,
                         shape.au6.offset_ms + cursor};
      iv6.push_back(*e.au6);
    }
    if (shape.has12) {
      e.au12 = AuInterval{shape.au12.onset_ms + cursor,
                          shape.au12.offset_ms + cursor};
      iv12.push_back(*e.au12);
    }
    log.push_back(e);
    cursor += shape.span_ms +
              static_cast<double>(ev_rng.uniform_int(800, 1500));
  }

  // Unrelated activity: bursts anywhere in the interior, non-overlapping,
  // silently dropped when they run out of room.
  const int n_other =
      cfg.n_other_bursts >= 0 ? cfg.n_other_bursts : cfg.n_events / 2;
  Rng other_rng(derive_seed(cfg.seed, "other"));
  std::vector<AuInterval> proposals;
  for (int i = 0; i < n_other; ++i) {
    const double d = static_cast<double>(other_rng.uniform_int(800, 2000));
    const auto hi = static_cast<long>(duration_ms - 2000.0 - d);
    if (hi < 2000) continue;
    const double on = static_cast<double>(other_rng.uniform_int(2000, hi));
    proposals.push_back({on, on + d});
  }
  std::sort(proposals.begin(), proposals.end(),
            [](const AuInterval& a, const AuInterval& b) {
              return a.onset_ms < b.onset_ms;
            });
  double last_end = -std::numeric_limits<double>::infinity();
  for (const auto& iv : proposals) {
    if (iv.onset_ms < last_end + 300.0) continue;
    ivo.push_back(iv);
    last_end = iv.offset_ms;
  }

  Eigen::MatrixXd sources(3, n);
  const double dt_ms = 1000.0 / cfg.emg_rate_hz;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * dt_ms;
    sources(0, i) = eval_envelope(iv6, t);
    sources(1, i) = eval_envelope(iv12, t);
    sources(2, i) = eval_envelope(ivo, t);
  }
  return {std::move(sources), std::move(log)};
}

namespace {

Eigen::MatrixXd draw_mixing(const SynthConfig& cfg) {
  if (cfg.mixing) {
    const Eigen::MatrixXd& m = *cfg.mixing;
    if (m.cols() != 3 || m.rows() < 3)
      throw InvalidArgumentError("mixing must have 3 columns and >= 3 rows");
    if ((m.array() <= 0.0).any())
      throw InvalidArgumentError("mixing entries must be positive");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    if (svd.singularValues().minCoeff() < 0.2)
      throw InvalidArgumentError("mixing is too close to singular");
    return m;
  }
  // Electrode model: channels 1..3 each sit over one muscle and pick it up
  // dominantly, with attenuated crosstalk from the neighbors; channel 4 is
  // a distal electrode that sees a blend of everything.
  Rng rng(derive_seed(cfg.seed, "mixing"));
  Eigen::MatrixXd m(4, 3);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (Eigen::Index r = 0; r < 3; ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        m(r, c) = r == c ? 0.8 + 0.4 * rng.uniform()
                         : 0.05 + 0.3 * rng.uniform();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      m(3, c) = 0.2 + 0.4 * rng.uniform();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    if (svd.singularValues().minCoeff() >= 0.2) return m;
  }
  throw DegenerateInputError("could not draw a well-conditioned mixing");
}

// Unit-variance noise band-limited to the physiological EMG range.
Eigen::MatrixXd draw_carriers(const SynthConfig& cfg, Eigen::Index n) {
  Rng rng(derive_seed(cfg.seed, "carriers"));
  const double high = std::min(450.0, 0.45 * cfg.emg_rate_hz);
  if (high <= 15.0)
    throw InvalidArgumentError("emg rate too low for the carrier band");
  const SosChain sos = butterworth_bandpass(4, 15.0, high, cfg.emg_rate_hz);
  Eigen::MatrixXd carriers(3, n);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (Eigen::Index s = 0; s < 3; ++s) {
    for (auto& x : w) x = rng.normal();
    const std::vector<double> f = sosfiltfilt(sos, w);
    double mean = 0.0;
    for (double x : f) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : f) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n - 1);
    const double scale = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
    for (Eigen::Index i = 0; i < n; ++i)
      carriers(s, i) = (f[static_cast<std::size_t>(i)] - mean) * scale;
  }
  return carriers;
}

}  // namespace

SyntheticSession generate_session(const SynthConfig& cfg) {
  auto [sources, log] = generate_envelopes(cfg);
  const Eigen::Index n = sources.cols();
  const Eigen::MatrixXd mixing = draw_mixing(cfg);
  const Eigen::MatrixXd carriers = draw_carriers(cfg, n);

  const Eigen::MatrixXd modulated = sources.cwiseProduct(carriers);
  Eigen::MatrixXd emg = mixing * modulated;

  if (std::isfinite(cfg.snr_db)) {
    const double p_signal =
        emg.squaredNorm() / static_cast<double>(emg.size());
    // A silent session still gets a unit noise floor so the recording is
    // usable downstream.
    const double sigma =
        p_signal > 0.0 ? std::sqrt(p_signal / std::pow(10.0, cfg.snr_db / 10.0))
                       : 1.0;
    Rng rng(derive_seed(cfg.seed, "sensor"));
    for (Eigen::Index c = 0; c < emg.rows(); ++c)
      for (Eigen::Index i = 0; i < n; ++i) emg(c, i) += sigma * rng.normal();
  }

  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(emg.rows()));
  for (Eigen::Index c = 0; c < emg.rows(); ++c)
    names.push_back("ch" + std::to_string(c + 1));
  Recording rec(emg, cfg.emg_rate_hz, names, 0.0);

  // Video-side tracks: the envelopes delayed by emg_lead_ms, resampled at
  // the video rate, with light observation noise. AU7 and AU10 shadow AU6
  // and AU12 the way a face tracker confuses neighboring actions.
  std::vector<AuInterval> iv6, iv12;
  for (const auto& e : log) {
    if (e.au6) iv6.push_back(*e.au6);
    if (e.au12) iv12.push_back(*e.au12);
  }
  const auto n_cv = static_cast<Eigen::Index>(
      std::llround(cfg.duration_s * cfg.video_rate_hz));
  if (n_cv < 2) throw InvalidArgumentError("session too short for video");
  Rng cv_rng(derive_seed(cfg.seed, "cv"));
  std::vector<double> c6(n_cv), c7(n_cv), c10(n_cv), c12(n_cv);
  std::vector<std::uint8_t> b6(n_cv), b12(n_cv);
  const double dt_cv = 1000.0 / cfg.video_rate_hz;
  for (Eigen::Index f = 0; f < n_cv; ++f) {
    const double t = static_cast<double>(f) * dt_cv - cfg.emg_lead_ms;
    const double e6 = eval_envelope(iv6, t);
    const double e12 = eval_envelope(iv12, t);
    c6[f] = std::max(0.0, e6 + 0.05 * cv_rng.normal());
    c7[f] = std::max(0.0, 0.75 * e6 + 0.08 * cv_rng.normal());
    c10[f] = std::max(0.0, 0.75 * e12 + 0.08 * cv_rng.normal());
    c12[f] = std::max(0.0, e12 + 0.05 * cv_rng.normal());
    b6[f] = c6[f] >= 0.5 ? 1 : 0;
    b12[f] = c12[f] >= 0.5 ? 1 : 0;
  }
  auto cont = [&](std::vector<double> v, const std::string& au) {
    return LabelTrack::continuous(std::move(v), cfg.video_rate_hz, au,
                                  Modality::kCv);
  };
  std::vector<LabelTrack> cv_tracks;
  cv_tracks.push_back(cont(std::move(c6), au::kAu6));
  cv_tracks.push_back(cont(std::move(c7), au::kAu7));
  cv_tracks.push_back(cont(std::move(c10), au::kAu10));
  cv_tracks.push_back(cont(std::move(c12), au::kAu12));
  {
    std::vector<double> v(b6.begin(), b6.end());
    cv_tracks.push_back(LabelTrack::binary(std::move(v), cfg.video_rate_hz,
                                           au::kAu6, Modality::kCv));
  }
  {
    std::vector<double> v(b12.begin(), b12.end());
    cv_tracks.push_back(LabelTrack::binary(std::move(v), cfg.video_rate_hz,
                                           au::kAu12, Modality::kCv));
  }

  // Ground truth at the EMG rate, no delay and no noise.
  std::vector<LabelTrack> truth;
  for (int row = 0; row < 2; ++row) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      v[static_cast<std::size_t>(i)] = sources(row, i) >= 0.5 ? 1.0 : 0.0;
    truth.push_back(LabelTrack::binary(std::move(v), cfg.emg_rate_hz,
                                       row == 0 ? au::kAu6 : au::kAu12,
                                       Modality::kSynthTruth));
  }

  SyntheticSession out{
      make_block(cfg.block_id, cfg.condition, std::move(rec),
                 std::move(cv_tracks), {}, std::move(truth)),
      std::move(sources), mixing, std::move(log)};
  return out;
}

std::vector<Eigen::MatrixXd> generate_synergy_corpus(
    const SynergyCorpusConfig& cfg) {
  if (cfg.k_true < 1) throw InvalidArgumentError("k_true must be >= 1");
  if (cfg.n_channels < cfg.k_true)
    throw InvalidArgumentError("need at least k_true channels");
  if (cfg.n_blocks < 1) throw InvalidArgumentError("need at least one block");
  if (cfg.n_samples < 100)
    throw InvalidArgumentError("need at least 100 samples per block");
  if (cfg.noise_std < 0.0)
    throw InvalidArgumentError("noise_std must be >= 0");

  Rng rng(derive_seed(cfg.seed, "synergy-corpus"));

  // Weights: each channel loads mostly on one synergy, round-robin, so the
  // columns are far from collinear and every synergy matters.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(cfg.n_channels, cfg.k_true);
  for (int ch = 0; ch < cfg.n_channels; ++ch) {
    const int own = ch % cfg.k_true;
    for (int k = 0; k < cfg.k_true; ++k)
      w(ch, k) = k == own ? 0.7 + 0.3 * rng.uniform() : 0.05 * rng.uniform();
  }
  for (int k = 0; k < cfg.k_true; ++k) w.col(k).normalize();

  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(static_cast<std::size_t>(cfg.n_blocks));
  for (int b = 0; b < cfg.n_blocks; ++b) {
    // The synergies take turns on one shared timeline, so at most one is
    // active at any sample. Disjoint supports keep a dropped component from
    // being absorbed by the others: the VAF lost at k_true - 1 stays near
    // 1 / k_true, far under any sensible selection threshold.
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(cfg.k_true, cfg.n_samples);
    int cursor = static_cast<int>(rng.uniform_int(0, 20));
    const int first = static_cast<int>(rng.uniform_int(0, cfg.k_true - 1));
    for (int slot = 0; cursor < cfg.n_samples; ++slot) {
      const int k = (first + slot) % cfg.k_true;
      const int dur = static_cast<int>(rng.uniform_int(40, 90));
      const double amp = 0.8 + 0.4 * rng.uniform();
      for (int i = 0; i < dur && cursor + i < cfg.n_samples; ++i) {
        const double phase =
            static_cast<double>(i) / static_cast<double>(dur - 1);
        h(k, cursor + i) = amp * 0.5 * (1.0 - std::cos(2.0 * M_PI * phase));
      }
      cursor += dur + static_cast<int>(rng.uniform_int(10, 30));
    }
    for (int k = 0; k < cfg.k_true; ++k) {
      const double rms = std::sqrt(h.row(k).squaredNorm() /
                                   static_cast<double>(cfg.n_samples));
      if (rms > 0.0) h.row(k) *= (0.9 + 0.2 * rng.uniform()) / rms;
    }
    Eigen::MatrixXd x = w * h;
    if (cfg.noise_std > 0.0) {
      for (Eigen::Index r = 0; r < x.rows(); ++r)
        for (Eigen::Index c = 0; c < x.cols(); ++c)
          x(r, c) += cfg.noise_std * rng.normal();
    }
    blocks.push_back(x.cwiseMax(0.0));
  }
  return blocks;
}

}  // namespace ausyn
