#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "ausyn/error.hpp"

namespace ausyn {

enum class Modality { kHuman, kCv, kEmg, kSynthTruth };
enum class TrackKind { kContinuous, kBinary };
enum class Condition { kPosed, kSpontaneous };

std::string to_string(Modality m);
std::string to_string(Condition c);
Modality modality_from_string(std::string_view s);
Condition condition_from_string(std::string_view s);

// Canonical action unit names. Other AUs ("AU1", "AU45", ...) are formed the
// same way: "AU" + unpadded index.
namespace au {
inline constexpr const char* kAu6 = "AU6";
inline constexpr const char* kAu7 = "AU7";
inline constexpr const char* kAu10 = "AU10";
inline constexpr const char* kAu12 = "AU12";
inline constexpr const char* kNoise = "NOISE";
inline constexpr const char* kOther = "OTHER";
}  // namespace au

// Uniformly sampled multichannel signal, channels x samples.
// Construction validates: positive finite rate, at least one channel and one
// sample, no non-finite values, channel name count matching the row count.
class Recording {
 public:
  Recording(Eigen::MatrixXd samples, double rate_hz,
            std::vector<std::string> channel_names = {},
            double start_time_ms = 0.0);

  const Eigen::MatrixXd& samples() const { return samples_; }
  Eigen::Index channels() const { return samples_.rows(); }
  Eigen::Index length() const { return samples_.cols(); }
  double rate_hz() const { return rate_hz_; }
  double start_time_ms() const { return start_time_ms_; }
  double duration_s() const {
    return static_cast<double>(length()) / rate_hz_;
  }
  const std::vector<std::string>& channel_names() const {
    return channel_names_;
  }

 private:
  Eigen::MatrixXd samples_;
  double rate_hz_;
  std::vector<std::string> channel_names_;
  double start_time_ms_;
};

// One label series for one action unit. Binary tracks hold only 0/1 values,
// continuous tracks any finite value. Use the factories; they validate.
struct LabelTrack {
  std::vector<double> values;
  double rate_hz = 0.0;
  std::string au;
  Modality modality = Modality::kCv;
  TrackKind kind = TrackKind::kContinuous;

  static LabelTrack continuous(std::vector<double> values, double rate_hz,
                               std::string au, Modality modality);
  static LabelTrack binary(std::vector<double> values, double rate_hz,
                           std::string au, Modality modality);

  double duration_s() const {
    return static_cast<double>(values.size()) / rate_hz;
  }
};

// Throws InvalidArgumentError when the track breaks its invariants.
void validate(const LabelTrack& track);

// One experimental block: the EMG recording plus whatever label tracks exist
// for it. Synthetic sessions fill truth_tracks, real data human_tracks.
struct Block {
  std::string id;
  Condition condition = Condition::kSpontaneous;
  Recording emg;
  std::vector<LabelTrack> cv_tracks;
  std::vector<LabelTrack> human_tracks;
  std::vector<LabelTrack> truth_tracks;
};

// Validates that every track covers the EMG wall-clock span to within one
// sample period of the coarser rate.
Block make_block(std::string id, Condition condition, Recording emg,
                 std::vector<LabelTrack> cv_tracks,
                 std::vector<LabelTrack> human_tracks = {},
                 std::vector<LabelTrack> truth_tracks = {});

// Resamples to a higher rate. Output length is round(n * target / source)
// so the covered duration is preserved; positions past the final source
// sample hold its value. Continuous tracks interpolate linearly, binary
// tracks take the source sample covering the target timestamp.
LabelTrack upsample_track(const LabelTrack& track, double target_rate_hz);

// Majority vote over the source samples covering each target sample period;
// exact ties resolve to active. Binary tracks only.
LabelTrack downsample_binary_majority(const LabelTrack& track,
                                      double target_rate_hz);

// Mean over the source samples covering each target sample period.
// Continuous tracks only.
LabelTrack downsample_continuous_mean(const LabelTrack& track,
                                      double target_rate_hz);

struct AlignedTracks {
  LabelTrack a;
  LabelTrack b;
  bool empty_overlap = false;
};

// Trims two equal-rate tracks to their common length. A zero-length overlap
// is flagged, not an error.
AlignedTracks align_tracks(const LabelTrack& a, const LabelTrack& b);

// First track matching the AU name and kind, or nullptr.
const LabelTrack* find_track(const std::vector<LabelTrack>& tracks,
                             std::string_view au, TrackKind kind);

}  // namespace ausyn
