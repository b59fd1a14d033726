#include <doctest.h>

#include <string>
#include <vector>

#include "ausyn/io.hpp"
#include "ausyn/rng.hpp"
#include "ausyn/synth.hpp"
#include "helpers.hpp"

using namespace ausyn;

namespace {

std::string fixture(const std::string& name) {
  return std::string(TEST_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("a small EMG file parses with the inferred rate") {
  auto rec = read_emg_csv(fixture("emg_ok.csv"));
  CHECK(rec.channels() == 4);
  CHECK(rec.length() == 3);
  CHECK(rec.rate_hz() == doctest::Approx(1000.0));
  CHECK(rec.samples()(0, 0) == 0.125);
  CHECK(rec.samples()(1, 0) == -0.5);
  CHECK(rec.samples()(3, 2) == 1.0);
  CHECK(rec.channel_names()[0] == "ch1");
}

TEST_CASE("a header-only EMG file is rejected") {
  CHECK_THROWS_AS(read_emg_csv(fixture("emg_header_only.csv")), ParseError);
}

TEST_CASE("a time gap is rejected with the offending line") {
  try {
    read_emg_csv(fixture("emg_gap.csv"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("spacing") != std::string::npos);
  }
}

TEST_CASE("spaced and unspaced face-tracker headers parse identically") {
  auto spaced = read_openface_csv(fixture("openface_spaced.csv"));
  auto packed = read_openface_csv(fixture("openface_unspaced.csv"));
  REQUIRE(spaced.size() == packed.size());
  REQUIRE(spaced.size() == 4);
  for (std::size_t i = 0; i < spaced.size(); ++i) {
    CHECK(spaced[i].au == packed[i].au);
    CHECK(spaced[i].kind == packed[i].kind);
    CHECK(spaced[i].rate_hz == packed[i].rate_hz);
    CHECK(spaced[i].values == packed[i].values);
  }
  CHECK(spaced[0].au == "AU6");
  CHECK(spaced[0].kind == TrackKind::kContinuous);
  CHECK(spaced[0].values == std::vector<double>{0.5, 1.75, 0.25});
  CHECK(spaced[2].kind == TrackKind::kBinary);
  CHECK(spaced[0].rate_hz == doctest::Approx(30.0).epsilon(0.01));
}

TEST_CASE("extra tracker columns are skipped, AU names canonicalize") {
  auto tracks = read_openface_csv(fixture("openface_zoo.csv"));
  REQUIRE(tracks.size() == 9);  // six _r plus three _c columns
  std::vector<std::string> names;
  for (const auto& t : tracks) names.push_back(t.au);
  const std::vector<std::string> want{"AU1", "AU6",  "AU7", "AU10", "AU12",
                                      "AU45", "AU1", "AU6", "AU12"};
  CHECK(names == want);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(tracks[i].kind == TrackKind::kContinuous);
  for (std::size_t i = 6; i < 9; ++i)
    CHECK(tracks[i].kind == TrackKind::kBinary);
  for (const auto& t : tracks) CHECK(t.values.size() == 4);
}

TEST_CASE("a tracker file without AU12 is rejected at the header") {
  try {
    read_openface_csv(fixture("openface_missing_au12.csv"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("AU12") != std::string::npos);
  }
}

TEST_CASE("presence values outside zero and one are rejected with the line") {
  try {
    read_openface_csv(fixture("openface_bad_presence.csv"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("an interval row becomes the right count of active frames") {
  auto tracks = read_interval_labels_csv(fixture("intervals_basic.csv"),
                                         3000.0, 30.0);
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].au == "AU12");
  CHECK(tracks[0].kind == TrackKind::kBinary);
  CHECK(tracks[0].modality == Modality::kHuman);
  REQUIRE(tracks[0].values.size() == 90);
  int active = 0;
  for (double v : tracks[0].values) active += v == 1.0;
  CHECK(active == 30);
  CHECK(tracks[0].values[29] == 0.0);
  CHECK(tracks[0].values[30] == 1.0);
  CHECK(tracks[0].values[59] == 1.0);
  CHECK(tracks[0].values[60] == 0.0);
}

TEST_CASE("an empty interval body yields all-zero tracks for requested AUs") {
  auto tracks = read_interval_labels_csv(fixture("intervals_empty.csv"),
                                         1000.0, 30.0, {"AU6", "AU12"});
  REQUIRE(tracks.size() == 2);
  for (const auto& t : tracks) {
    CHECK(t.values.size() == 30);
    for (double v : t.values) CHECK(v == 0.0);
  }
}

TEST_CASE("overlapping intervals merge into one run") {
  auto tracks = read_interval_labels_csv(fixture("intervals_overlap.csv"),
                                         3000.0, 30.0, {"AU6"});
  REQUIRE(tracks.size() == 1);
  int rises = 0;
  for (std::size_t i = 0; i < tracks[0].values.size(); ++i)
    if (tracks[0].values[i] == 1.0 &&
        (i == 0 || tracks[0].values[i - 1] == 0.0))
      ++rises;
  CHECK(rises == 1);
  // [1000, 2000) merged with [1500, 2500): active exactly on [1000, 2500).
  CHECK(tracks[0].values[30] == 1.0);
  CHECK(tracks[0].values[74] == 1.0);
  CHECK(tracks[0].values[75] == 0.0);
}

TEST_CASE("a reversed interval is rejected with its line") {
  try {
    read_interval_labels_csv(fixture("intervals_bad.csv"), 1000.0, 30.0);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("onset") != std::string::npos);
  }
}

TEST_CASE("EMG recordings round-trip bit for bit") {
  Rng rng(77);
  Eigen::MatrixXd m(4, 50);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.normal();
  Recording rec(m, 1000.0, {"ch1", "ch2", "ch3", "ch4"}, 0.0);

  testutil::TempDir dir("emg-roundtrip");
  const std::string path = dir.path("emg.csv");
  write_emg_csv(path, rec);
  auto back = read_emg_csv(path);
  CHECK(back.rate_hz() == 1000.0);
  CHECK(back.samples() == rec.samples());
  CHECK(back.channel_names() == rec.channel_names());

  // Writing the same recording twice produces identical bytes.
  const std::string again = dir.path("emg2.csv");
  write_emg_csv(again, rec);
  CHECK(read_text_file(path) == read_text_file(again));
}

TEST_CASE("label tracks round-trip through the multi-column format") {
  Rng rng(5);
  std::vector<double> a(40), b(40);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform(0.0, 5.0);
    b[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
  }
  std::vector<LabelTrack> tracks{
      LabelTrack::continuous(a, 30.0, au::kAu6, Modality::kCv),
      LabelTrack::continuous(b, 30.0, au::kAu12, Modality::kCv)};
  testutil::TempDir dir("tracks-roundtrip");
  const std::string path = dir.path("tracks.csv");
  write_label_tracks_csv(path, tracks);
  auto back = read_label_tracks_csv(path, Modality::kCv,
                                    TrackKind::kContinuous);
  REQUIRE(back.size() == 2);
  CHECK(back[0].au == "AU6");
  CHECK(back[1].au == "AU12");
  CHECK(back[0].values == tracks[0].values);
  CHECK(back[1].values == tracks[1].values);
  CHECK(back[0].rate_hz == doctest::Approx(30.0).epsilon(1e-9));
}

TEST_CASE("a single track file round-trips") {
  std::vector<double> v{0.0, 1.0, 1.0, 0.0, 1.0};
  auto track = LabelTrack::binary(v, 30.0, au::kAu12, Modality::kEmg);
  testutil::TempDir dir("track-roundtrip");
  const std::string path = dir.path("track.csv");
  write_track_csv(path, track);
  auto back = read_track_csv(path, au::kAu12, Modality::kEmg,
                             TrackKind::kBinary);
  CHECK(back.values == v);
  CHECK(back.kind == TrackKind::kBinary);
}

TEST_CASE("matrices round-trip including negatives and tiny values") {
  Eigen::MatrixXd m(3, 4);
  m << 1.0, -2.5, 3.14159265358979312, 4e-17,
       -5.0, 6.25, -7.125, 0.1,
       0.0, -0.0, 123456789.5, -9.875e-12;
  testutil::TempDir dir("matrix-roundtrip");
  const std::string path = dir.path("m.csv");
  write_matrix_csv(path, m);
  auto back = read_matrix_csv(path);
  REQUIRE(back.rows() == 3);
  REQUIRE(back.cols() == 4);
  CHECK(back == m);
}

TEST_CASE("event logs round-trip with their optional intervals") {
  SynthConfig cfg;
  cfg.duration_s = 60.0;
  cfg.n_events = 6;
  cfg.pattern_script = std::vector<CooccurrencePattern>{
      CooccurrencePattern::kAu6Only,       CooccurrencePattern::kAu12Only,
      CooccurrencePattern::kAu12InsideAu6, CooccurrencePattern::kAu6InsideAu12,
      CooccurrencePattern::kAu12BeforeAu6, CooccurrencePattern::kAu6BeforeAu12};
  cfg.seed = 3;
  auto [sources, log] = generate_envelopes(cfg);
  testutil::TempDir dir("events-roundtrip");
  const std::string path = dir.path("events.csv");
  write_events_csv(path, log);
  auto back = read_events_csv(path);
  REQUIRE(back.size() == log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(back[i].pattern == log[i].pattern);
    CHECK(back[i].onset_ms == log[i].onset_ms);
    CHECK(back[i].offset_ms == log[i].offset_ms);
    CHECK(back[i].au6.has_value() == log[i].au6.has_value());
    CHECK(back[i].au12.has_value() == log[i].au12.has_value());
    if (log[i].au6) {
      CHECK(back[i].au6->onset_ms == log[i].au6->onset_ms);
      CHECK(back[i].au6->offset_ms == log[i].au6->offset_ms);
    }
    if (log[i].au12) {
      CHECK(back[i].au12->onset_ms == log[i].au12->onset_ms);
      CHECK(back[i].au12->offset_ms == log[i].au12->offset_ms);
    }
  }
}

TEST_CASE("openface writer output reparses to the same tracks") {
  std::vector<LabelTrack> tracks{
      LabelTrack::continuous({0.5, 1.5, 2.5, 0.25}, 30.0, au::kAu6,
                             Modality::kCv),
      LabelTrack::continuous({1.0, 2.0, 3.0, 0.5}, 30.0, au::kAu12,
                             Modality::kCv),
      LabelTrack::binary({0, 1, 1, 0}, 30.0, au::kAu12, Modality::kCv)};
  testutil::TempDir dir("openface-roundtrip");
  const std::string path = dir.path("of.csv");
  write_openface_csv(path, tracks);
  auto back = read_openface_csv(path);
  REQUIRE(back.size() == 3);
  CHECK(back[0].au == "AU6");
  CHECK(back[1].au == "AU12");
  CHECK(back[2].kind == TrackKind::kBinary);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(back[i].values == tracks[i].values);
}

TEST_CASE("missing files raise an i/o error, not a crash") {
  CHECK_THROWS_AS(read_emg_csv(fixture("does_not_exist.csv")), IoError);
}

}  // TEST_SUITE
