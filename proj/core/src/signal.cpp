#include "ausyn/signal.hpp"

#include <algorithm>
#include <cmath>

namespace ausyn {

namespace {

bool rates_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

std::string to_string(Modality m) {
  switch (m) {
    case Modality::kHuman:
      return "HUMAN";
    case Modality::kCv:
      return "CV";
    case Modality::kEmg:
      return "EMG";
    case Modality::kSynthTruth:
      return "SYNTH_TRUTH";
  }
  throw InvalidArgumentError("unknown modality");
}

std::string to_string(Condition c) {
  return c == Condition::kPosed ? "POSED" : "SPONTANEOUS";
}

Modality modality_from_string(std::string_view s) {
  if (s == "HUMAN") return Modality::kHuman;
  if (s == "CV") return Modality::kCv;
  if (s == "EMG") return Modality::kEmg;
  if (s == "SYNTH_TRUTH") return Modality::kSynthTruth;
  throw InvalidArgumentError("unknown modality: " + std::string(s));
}

Condition condition_from_string(std::string_view s) {
  if (s == "POSED") return Condition::kPosed;
  if (s == "SPONTANEOUS") return Condition::kSpontaneous;
  throw InvalidArgumentError("unknown condition: " + std::string(s));
}

Recording::Recording(Eigen::MatrixXd samples, double rate_hz,
                     std::vector<std::string> channel_names,
                     double start_time_ms)
    : samples_(std::move(samples)),
      rate_hz_(rate_hz),
      channel_names_(std::move(channel_names)),
      start_time_ms_(start_time_ms) {
  if (!(rate_hz_ > 0.0) || !std::isfinite(rate_hz_)) {
    throw InvalidArgumentError("recording rate must be positive and finite");
  }
  if (samples_.rows() < 1 || samples_.cols() < 1) {
    throw InvalidArgumentError(
        "recording needs at least one channel and one sample");
  }
  if (!samples_.allFinite()) {
    throw InvalidArgumentError("recording contains non-finite samples");
  }
  if (!std::isfinite(start_time_ms_)) {
    throw InvalidArgumentError("recording start time must be finite");
  }
  if (channel_names_.empty()) {
    channel_names_.reserve(static_cast<std::size_t>(samples_.rows()));
    for (Eigen::Index c = 0; c < samples_.rows(); ++c) {
      channel_names_.push_back("ch" + std::to_string(c + 1));
    }
  } else if (std::ssize(channel_names_) != samples_.rows()) {
    throw InvalidArgumentError("channel name count does not match channels");
  }
}

void validate(const LabelTrack& track) {
  if (!(track.rate_hz > 0.0) || !std::isfinite(track.rate_hz)) {
    throw InvalidArgumentError("track rate must be positive and finite");
  }
  if (track.au.empty()) {
    throw InvalidArgumentError("track needs an AU name");
  }
  for (const double v : track.values) {
    if (!std::isfinite(v)) {
      throw InvalidArgumentError("track contains non-finite values");
    }
    if (track.kind == TrackKind::kBinary && v != 0.0 && v != 1.0) {
      throw InvalidArgumentError("binary track contains values outside {0,1}");
    }
  }
}

LabelTrack LabelTrack::continuous(std::vector<double> values, double rate_hz,
                                  std::string au, Modality modality) {
  LabelTrack t{std::move(values), rate_hz, std::move(au), modality,
               TrackKind::kContinuous};
  validate(t);
  return t;
}

LabelTrack LabelTrack::binary(std::vector<double> values, double rate_hz,
                              std::string au, Modality modality) {
  LabelTrack t{std::move(values), rate_hz, std::move(au), modality,
               TrackKind::kBinary};
  validate(t);
  return t;
}

Block make_block(std::string id, Condition condition, Recording emg,
                 std::vector<LabelTrack> cv_tracks,
                 std::vector<LabelTrack> human_tracks,
                 std::vector<LabelTrack> truth_tracks) {
  const double emg_dur = emg.duration_s();
  auto check = [&](const std::vector<LabelTrack>& tracks) {
    for (const auto& t : tracks) {
      validate(t);
      const double coarse_period = 1.0 / std::min(t.rate_hz, emg.rate_hz());
      if (std::abs(t.duration_s() - emg_dur) > coarse_period + 1e-9) {
        throw InvalidArgumentError("track " + t.au +
                                   " does not cover the EMG span");
      }
    }
  };
  check(cv_tracks);
  check(human_tracks);
  check(truth_tracks);
  return Block{std::move(id),           condition,
               std::move(emg),          std::move(cv_tracks),
               std::move(human_tracks), std::move(truth_tracks)};
}

LabelTrack upsample_track(const LabelTrack& track, double target_rate_hz) {
  validate(track);
  if (!(target_rate_hz > 0.0) || !std::isfinite(target_rate_hz)) {
    throw InvalidArgumentError("target rate must be positive and finite");
  }
  if (target_rate_hz < track.rate_hz) {
    throw InvalidArgumentError("upsample target rate below source rate");
  }
  const auto n = static_cast<std::int64_t>(track.values.size());
  const auto m = static_cast<std::int64_t>(
      std::llround(static_cast<double>(n) * target_rate_hz / track.rate_hz));
  LabelTrack out = track;
  out.rate_hz = target_rate_hz;
  out.values.assign(static_cast<std::size_t>(m), 0.0);
  if (n == 0) return out;
  const double ratio = track.rate_hz / target_rate_hz;
  for (std::int64_t i = 0; i < m; ++i) {
    const double pos = static_cast<double>(i) * ratio;
    auto lo = static_cast<std::int64_t>(std::floor(pos));
    lo = std::clamp<std::int64_t>(lo, 0, n - 1);
    if (track.kind == TrackKind::kBinary) {
      out.values[static_cast<std::size_t>(i)] =
          track.values[static_cast<std::size_t>(lo)];
    } else {
      const auto hi = std::min<std::int64_t>(lo + 1, n - 1);
      const double frac = pos - static_cast<double>(lo);
      out.values[static_cast<std::size_t>(i)] =
          (1.0 - frac) * track.values[static_cast<std::size_t>(lo)] +
          frac * track.values[static_cast<std::size_t>(hi)];
    }
  }
  return out;
}

LabelTrack downsample_binary_majority(const LabelTrack& track,
                                      double target_rate_hz) {
  validate(track);
  if (track.kind != TrackKind::kBinary) {
    throw InvalidArgumentError("majority downsampling needs a binary track");
  }
  if (!(target_rate_hz > 0.0) || !std::isfinite(target_rate_hz)) {
    throw InvalidArgumentError("target rate must be positive and finite");
  }
  if (target_rate_hz > track.rate_hz) {
    throw InvalidArgumentError("downsample target rate above source rate");
  }
  const auto n = static_cast<std::int64_t>(track.values.size());
  const auto m = static_cast<std::int64_t>(
      std::llround(static_cast<double>(n) * target_rate_hz / track.rate_hz));
  LabelTrack out = track;
  out.rate_hz = target_rate_hz;
  out.values.assign(static_cast<std::size_t>(m), 0.0);
  const double ratio = track.rate_hz / target_rate_hz;
  for (std::int64_t i = 0; i < m; ++i) {
    auto begin = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(i) * ratio - 1e-9));
    auto end = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(i + 1) * ratio - 1e-9));
    begin = std::clamp<std::int64_t>(begin, 0, n);
    end = std::clamp<std::int64_t>(end, begin, n);
    if (end <= begin) continue;  // degenerate tail window stays inactive
    std::int64_t active = 0;
    for (std::int64_t j = begin; j < end; ++j) {
      active += track.values[static_cast<std::size_t>(j)] != 0.0 ? 1 : 0;
    }
    // Exact ties count as active.
    out.values[static_cast<std::size_t>(i)] =
        2 * active >= (end - begin) ? 1.0 : 0.0;
  }
  return out;
}

LabelTrack downsample_continuous_mean(const LabelTrack& track,
                                      double target_rate_hz) {
  validate(track);
  if (track.kind != TrackKind::kContinuous) {
    throw InvalidArgumentError("mean downsampling needs a continuous track");
  }
  if (!(target_rate_hz > 0.0) || !std::isfinite(target_rate_hz)) {
    throw InvalidArgumentError("target rate must be positive and finite");
  }
  if (target_rate_hz > track.rate_hz) {
    throw InvalidArgumentError("downsample target rate above source rate");
  }
  const auto n = static_cast<std::int64_t>(track.values.size());
  const auto m = static_cast<std::int64_t>(
      std::llround(static_cast<double>(n) * target_rate_hz / track.rate_hz));
  LabelTrack out = track;
  out.rate_hz = target_rate_hz;
  out.values.assign(static_cast<std::size_t>(m), 0.0);
  const double ratio = track.rate_hz / target_rate_hz;
  for (std::int64_t i = 0; i < m; ++i) {
    auto begin = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(i) * ratio - 1e-9));
    auto end = static_cast<std::int64_t>(
        std::ceil(static_cast<double>(i + 1) * ratio - 1e-9));
    begin = std::clamp<std::int64_t>(begin, 0, n);
    end = std::clamp<std::int64_t>(end, begin, n);
    if (end <= begin) continue;
    double sum = 0.0;
    for (std::int64_t j = begin; j < end; ++j) {
      sum += track.values[static_cast<std::size_t>(j)];
    }
    out.values[static_cast<std::size_t>(i)] =
        sum / static_cast<double>(end - begin);
  }
  return out;
}

AlignedTracks align_tracks(const LabelTrack& a, const LabelTrack& b) {
  validate(a);
  validate(b);
  if (!rates_equal(a.rate_hz, b.rate_hz)) {
    throw InvalidArgumentError("align_tracks needs equal rates");
  }
  const std::size_t n = std::min(a.values.size(), b.values.size());
  AlignedTracks out{a, b, n == 0};
  out.a.values.resize(n);
  out.b.values.resize(n);
  return out;
}

const LabelTrack* find_track(const std::vector<LabelTrack>& tracks,
                             std::string_view au, TrackKind kind) {
  for (const auto& t : tracks) {
    if (t.au == au && t.kind == kind) return &t;
  }
  return nullptr;
}

}  // namespace ausyn
