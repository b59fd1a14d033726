#include "ausyn/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ausyn/error.hpp"
#include "ausyn/rng.hpp"
#include "ausyn/xcorr.hpp"

namespace ausyn {
namespace {

std::vector<double> row_to_vector(const Eigen::MatrixXd& m, Eigen::Index r) {
  std::vector<double> v(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.cols(); ++i)
    v[static_cast<std::size_t>(i)] = m(r, i);
  return v;
}

// Upsampled video track trimmed against an EMG-rate series of length n.
std::vector<double> video_at_rate(const LabelTrack& track, double rate_hz,
                                  std::size_t n) {
  const LabelTrack up = upsample_track(track, rate_hz);
  const std::size_t len = std::min(n, up.values.size());
  return std::vector<double>(up.values.begin(),
                             up.values.begin() + static_cast<long>(len));
}

long clamp_lag(double max_lag_s, double rate_hz, std::size_t n) {
  if (n < 3) throw InvalidArgumentError("series too short for a lag scan");
  const long want = std::llround(max_lag_s * rate_hz);
  return std::clamp(want, 0L, static_cast<long>(n) - 2);
}

}  // namespace

std::vector<std::uint8_t> threshold_activity(const std::vector<double>& envelope,
                                             double rate_hz,
                                             const ThresholdConfig& cfg,
                                             const SgConfig& smoothing) {
  if (!(rate_hz > 0.0)) throw InvalidArgumentError("rate must be positive");
  if (!(cfg.baseline_s > 0.0))
    throw InvalidArgumentError("baseline window must be positive");
  if (cfg.k_sigma < 0.0) throw InvalidArgumentError("k_sigma must be >= 0");
  if (envelope.size() < 2)
    throw InvalidArgumentError("envelope too short to threshold");

  const std::vector<double> smoothed = savitzky_golay(envelope, smoothing);
  const auto n = smoothed.size();
  const auto n_base = std::min(
      n, static_cast<std::size_t>(
             std::max<long>(2, std::llround(cfg.baseline_s * rate_hz))));

  double mean = 0.0;
  for (std::size_t i = 0; i < n_base; ++i) mean += smoothed[i];
  mean /= static_cast<double>(n_base);
  double var = 0.0;
  for (std::size_t i = 0; i < n_base; ++i) {
    const double d = smoothed[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(n_base - 1);
  const double sigma = std::max(std::sqrt(var), cfg.sigma_floor);
  const double gate = mean + cfg.k_sigma * sigma;

  std::vector<std::uint8_t> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = smoothed[i] > gate ? 1 : 0;
  return active;
}

ComponentAssignment assign_components(const Eigen::MatrixXd& envelopes,
                                      double envelope_rate_hz,
                                      const LabelTrack& cv_au6,
                                      const LabelTrack& cv_au12,
                                      double max_lag_s,
                                      std::uint64_t noise_seed) {
  if (envelopes.rows() < 2)
    throw InvalidArgumentError("need at least two components to assign");
  if (!(envelope_rate_hz > 0.0))
    throw InvalidArgumentError("rate must be positive");

  const auto n = static_cast<std::size_t>(envelopes.cols());
  const std::vector<double> ref6 = video_at_rate(cv_au6, envelope_rate_hz, n);
  const std::vector<double> ref12 = video_at_rate(cv_au12, envelope_rate_hz, n);
  const std::size_t len = std::min({n, ref6.size(), ref12.size()});
  const long max_lag = clamp_lag(max_lag_s, envelope_rate_hz, len);

  std::vector<double> noise_ref(len);
  Rng noise_rng(noise_seed);
  for (double& v : noise_ref) v = noise_rng.uniform();

  const auto k = envelopes.rows();
  Eigen::MatrixXd scores(k, 3);
  for (Eigen::Index c = 0; c < k; ++c) {
    std::vector<double> env = row_to_vector(envelopes, c);
    env.resize(len);
    const std::span<const double> e(env.data(), len);
    scores(c, 0) =
        max_lag_pearson(e, {ref6.data(), len}, max_lag, true).correlation;
    scores(c, 1) =
        max_lag_pearson(e, {ref12.data(), len}, max_lag, true).correlation;
    scores(c, 2) =
        max_lag_pearson(e, {noise_ref.data(), len}, max_lag, true).correlation;
  }

  // AU12 takes the best component outright, AU6 the best of the rest, and
  // whatever is left over is treated as noise. Lowest index wins exact ties.
  ComponentAssignment out;
  out.scores = scores;
  out.noise_seed = noise_seed;
  Eigen::Index best12 = 0;
  for (Eigen::Index c = 1; c < k; ++c)
    if (scores(c, 1) > scores(best12, 1)) best12 = c;
  out.au12_component = static_cast<int>(best12);
  out.au12_score = scores(best12, 1);
  Eigen::Index best6 = -1;
  for (Eigen::Index c = 0; c < k; ++c) {
    if (c == best12) continue;
    if (best6 < 0 || scores(c, 0) > scores(best6, 0)) best6 = c;
  }
  out.au6_component = static_cast<int>(best6);
  out.au6_score = scores(best6, 0);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (c != best12 && c != best6) {
      out.other_component = static_cast<int>(c);
      break;
    }
  }
  return out;
}

DelayEstimate estimate_delay(const std::vector<double>& envelope,
                             double envelope_rate_hz,
                             const LabelTrack& video_track,
                             double max_lag_s) {
  if (!(envelope_rate_hz > 0.0))
    throw InvalidArgumentError("rate must be positive");
  const std::vector<double> ref =
      video_at_rate(video_track, envelope_rate_hz, envelope.size());
  const std::size_t len = std::min(envelope.size(), ref.size());
  const long max_lag = clamp_lag(max_lag_s, envelope_rate_hz, len);

  const auto constant = [len](const double* v) {
    for (std::size_t i = 1; i < len; ++i)
      if (v[i] != v[0]) return false;
    return true;
  };
  if (constant(envelope.data()) || constant(ref.data()))
    throw DegenerateInputError("delay estimation needs non-constant series");

  const LagPeak peak = max_lag_pearson({envelope.data(), len},
                                       {ref.data(), len}, max_lag, true);
  DelayEstimate d;
  d.au = video_track.au;
  d.lag_samples = peak.lag;
  d.lag_ms = static_cast<double>(peak.lag) * 1000.0 / envelope_rate_hz;
  d.correlation = peak.correlation;
  return d;
}

DetectionResult detect_aus(const Block& block, const DetectConfig& cfg) {
  if (cfg.n_components < 2 || cfg.n_components > block.emg.channels())
    throw InvalidArgumentError(
        "component count must lie in [2, channel count]");
  const LabelTrack* cv6 =
      find_track(block.cv_tracks, au::kAu6, TrackKind::kContinuous);
  const LabelTrack* cv12 =
      find_track(block.cv_tracks, au::kAu12, TrackKind::kContinuous);
  if (cv6 == nullptr || cv12 == nullptr)
    throw InvalidArgumentError(
        "block lacks continuous video tracks for AU6 and AU12");

  const double rate = block.emg.rate_hz();
  DetectionResult out;
  if (cfg.ica_input == IcaInput::kEnvelope) {
    const Recording env = preprocess_emg(block.emg, cfg.preprocess);
    out.ica = fastica(env, cfg.n_components, derive_seed(cfg.seed, "ica"));
    out.component_envelopes = out.ica.sources;
  } else {
    const Recording bp = bandpass_emg(block.emg, cfg.preprocess);
    out.ica = fastica(bp, cfg.n_components, derive_seed(cfg.seed, "ica"));
    const Recording srec(out.ica.sources, rate);
    out.component_envelopes =
        envelope_emg(srec, cfg.preprocess).samples();
  }

  out.assignment =
      assign_components(out.component_envelopes, rate, *cv6, *cv12,
                        cfg.assign_max_lag_s, derive_seed(cfg.seed, "noise"));

  out.component_active.reserve(
      static_cast<std::size_t>(out.component_envelopes.rows()));
  for (Eigen::Index c = 0; c < out.component_envelopes.rows(); ++c) {
    out.component_active.push_back(
        threshold_activity(row_to_vector(out.component_envelopes, c), rate,
                           cfg.threshold, cfg.smoothing));
  }

  auto as_track = [&](int comp, const char* au_name) {
    const auto& act = out.component_active[static_cast<std::size_t>(comp)];
    std::vector<double> v(act.begin(), act.end());
    return LabelTrack::binary(std::move(v), rate, au_name, Modality::kEmg);
  };
  out.au6 = as_track(out.assignment.au6_component, au::kAu6);
  out.au12 = as_track(out.assignment.au12_component, au::kAu12);

  const std::vector<double> env6 =
      row_to_vector(out.component_envelopes, out.assignment.au6_component);
  const std::vector<double> env12 =
      row_to_vector(out.component_envelopes, out.assignment.au12_component);
  out.delays.push_back(estimate_delay(env6, rate, *cv6, cfg.delay_max_lag_s));
  out.delays.push_back(
      estimate_delay(env12, rate, *cv12, cfg.delay_max_lag_s));
  return out;
}

CascadeResult cascade_synergies(
    const std::vector<std::vector<std::uint8_t>>& component_active,
    std::uint64_t seed) {
  if (component_active.empty())
    throw InvalidArgumentError("no component tracks");
  const std::size_t n = component_active.front().size();
  for (const auto& t : component_active)
    if (t.size() != n)
      throw InvalidArgumentError("component tracks must share one length");
  if (n == 0) throw InvalidArgumentError("component tracks are empty");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(component_active.size()),
                    static_cast<Eigen::Index>(n));
  bool any = false;
  for (std::size_t r = 0; r < component_active.size(); ++r)
    for (std::size_t i = 0; i < n; ++i) {
      x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
          component_active[r][i];
      any = any || component_active[r][i] != 0;
    }

  CascadeResult out;
  if (!any) {
    out.skipped = true;
    return out;
  }
  out.factorization = nnmf_factorize(x, 2, derive_seed(seed, "cascade"));
  return out;
}

}  // namespace ausyn
