#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ausyn/cooccur.hpp"
#include "ausyn/dsp.hpp"
#include "ausyn/error.hpp"
#include "ausyn/io.hpp"
#include "ausyn/labeling.hpp"
#include "ausyn/metrics.hpp"
#include "ausyn/nnmf.hpp"
#include "ausyn/report.hpp"
#include "ausyn/rng.hpp"
#include "ausyn/signal.hpp"
#include "ausyn/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace ausyn;

namespace {

struct Globals {
  std::uint64_t seed = 42;
  std::string out = ".";
  int jobs = 1;
};

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
}

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

Condition parse_condition(const std::string& s) {
  if (s == "posed") return Condition::kPosed;
  if (s == "spontaneous") return Condition::kSpontaneous;
  throw InvalidArgumentError("condition must be posed or spontaneous");
}

Modality parse_modality(const std::string& s) {
  if (s == "emg") return Modality::kEmg;
  if (s == "cv") return Modality::kCv;
  if (s == "human") return Modality::kHuman;
  if (s == "truth") return Modality::kSynthTruth;
  throw InvalidArgumentError("modality must be emg, cv, human, or truth");
}

// Brings two binary tracks onto the coarser of the two rates and trims them
// to the common length.
AlignedTracks align_binary(const LabelTrack& a, const LabelTrack& b) {
  if (a.rate_hz > b.rate_hz)
    return align_tracks(downsample_binary_majority(a, b.rate_hz), b);
  if (b.rate_hz > a.rate_hz)
    return align_tracks(a, downsample_binary_majority(b, a.rate_hz));
  return align_tracks(a, b);
}

void add_agreement_pair(ReportBuilder& report, const std::string& key,
                        const LabelTrack& pred, const LabelTrack& truth) {
  const AlignedTracks pair = align_binary(pred, truth);
  const ConfusionCounts counts = confusion_counts(pair.a, pair.b);
  report.add_confusion(key, counts);
  report.add_agreement(key, cohens_kappa(counts));
}

struct SimulateFlags {
  double duration_s = 90.0;
  int events = 10;
  double snr_db = 10.0;
  double lead_ms = 374.0;
};

SyntheticSession simulate_to_dir(const SimulateFlags& flags,
                                 std::uint64_t seed, const std::string& dir) {
  SynthConfig cfg;
  cfg.duration_s = flags.duration_s;
  cfg.n_events = flags.events;
  cfg.snr_db = flags.snr_db;
  cfg.emg_lead_ms = flags.lead_ms;
  cfg.seed = seed;
  SyntheticSession session = generate_session(cfg);

  ensure_out_dir(dir);
  write_emg_csv(join(dir, "emg.csv"), session.block.emg);
  write_openface_csv(join(dir, "openface.csv"), session.block.cv_tracks);
  write_label_tracks_csv(join(dir, "truth.csv"), session.block.truth_tracks);
  write_events_csv(join(dir, "events.csv"), session.event_log);
  return session;
}

Block load_session_dir(const std::string& dir) {
  Recording emg = read_emg_csv(join(dir, "emg.csv"));
  std::vector<LabelTrack> cv = read_openface_csv(join(dir, "openface.csv"));
  std::vector<LabelTrack> truth;
  if (fs::exists(join(dir, "truth.csv")))
    truth = read_label_tracks_csv(join(dir, "truth.csv"),
                                  Modality::kSynthTruth, TrackKind::kBinary);
  return make_block(fs::path(dir).filename().string(),
                    Condition::kSpontaneous, std::move(emg), std::move(cv),
                    {}, std::move(truth));
}

void write_report(const ReportBuilder& report, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  write_text_file_atomic(join(out_dir, "report.json"), report.to_string());
}

// Detection results plus agreements against whatever reference tracks exist.
void report_detection(ReportBuilder& report, const Block& block,
                      const DetectionResult& res, std::uint64_t seed) {
  report.add_assignment(res.assignment);
  for (const auto& d : res.delays) report.add_delay(d);
  report.add_cascade(cascade_synergies(res.component_active, seed));

  const LabelTrack* truth6 =
      find_track(block.truth_tracks, au::kAu6, TrackKind::kBinary);
  const LabelTrack* truth12 =
      find_track(block.truth_tracks, au::kAu12, TrackKind::kBinary);
  if (truth6 != nullptr) add_agreement_pair(report, "emg_vs_truth/AU6", res.au6, *truth6);
  if (truth12 != nullptr)
    add_agreement_pair(report, "emg_vs_truth/AU12", res.au12, *truth12);

  const LabelTrack* cv6 =
      find_track(block.cv_tracks, au::kAu6, TrackKind::kBinary);
  const LabelTrack* cv12 =
      find_track(block.cv_tracks, au::kAu12, TrackKind::kBinary);
  if (cv6 != nullptr) add_agreement_pair(report, "emg_vs_cv/AU6", res.au6, *cv6);
  if (cv12 != nullptr)
    add_agreement_pair(report, "emg_vs_cv/AU12", res.au12, *cv12);
  if (truth6 != nullptr && cv6 != nullptr)
    add_agreement_pair(report, "cv_vs_truth/AU6", *cv6, *truth6);
  if (truth12 != nullptr && cv12 != nullptr)
    add_agreement_pair(report, "cv_vs_truth/AU12", *cv12, *truth12);
}

int run_simulate(const SimulateFlags& flags, const Globals& g) {
  simulate_to_dir(flags, g.seed, g.out);
  return 0;
}

int run_detect(const std::string& emg_path, const std::string& openface_path,
               const std::string& truth_path, IcaInput ica_input,
               const Globals& g) {
  Recording emg = read_emg_csv(emg_path);
  std::vector<LabelTrack> cv = read_openface_csv(openface_path);
  std::vector<LabelTrack> truth;
  if (!truth_path.empty())
    truth = read_label_tracks_csv(truth_path, Modality::kSynthTruth,
                                  TrackKind::kBinary);
  Block block = make_block(stem_of(emg_path), Condition::kSpontaneous,
                           std::move(emg), std::move(cv), {},
                           std::move(truth));

  DetectConfig cfg;
  cfg.seed = g.seed;
  cfg.ica_input = ica_input;
  const DetectionResult res = detect_aus(block, cfg);

  ensure_out_dir(g.out);
  write_track_csv(join(g.out, "au6_emg.csv"), res.au6);
  write_track_csv(join(g.out, "au12_emg.csv"), res.au12);

  std::vector<std::string> inputs{emg_path, openface_path};
  if (!truth_path.empty()) inputs.push_back(truth_path);
  ReportBuilder report(
      ReportMeta{"detect", g.seed, g.jobs, std::move(inputs)});
  report_detection(report, block, res, g.seed);
  write_report(report, g.out);
  return 0;
}

int run_cooccur(const std::string& au6_path, const std::string& au12_path,
                const std::string& condition, const std::string& modality,
                const Globals& g) {
  const Condition cond = parse_condition(condition);
  const Modality mod = parse_modality(modality);
  const LabelTrack a6 = read_track_csv(au6_path, au::kAu6, mod,
                                       TrackKind::kBinary);
  const LabelTrack a12 = read_track_csv(au12_path, au::kAu12, mod,
                                        TrackKind::kBinary);
  const AlignedTracks pair = align_binary(a6, a12);
  const CooccurrenceSummary summary =
      classify_cooccurrence(pair.a, pair.b, cond, mod);

  ReportBuilder report(
      ReportMeta{"cooccur", g.seed, g.jobs, {au6_path, au12_path}});
  report.add_cooccurrence("labels", summary);
  report.add_onset_profile("labels", onset_aligned_profile(pair.a, pair.b));
  write_report(report, g.out);
  return 0;
}

int run_synergy(const std::vector<std::string>& track_paths, int kmax,
                double threshold, const Globals& g) {
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(track_paths.size());
  for (const auto& p : track_paths) blocks.push_back(read_matrix_csv(p));

  const VafCurve curve = select_synergy_count(
      blocks, kmax, threshold, derive_seed(g.seed, "synergy"), 10, 1000,
      1e-6, g.jobs);

  ReportBuilder report(ReportMeta{"synergy", g.seed, g.jobs, track_paths});
  report.add_vaf_curve(curve);
  ensure_out_dir(g.out);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const NnmfResult res =
        nnmf_factorize(blocks[b], curve.selected_k,
                       derive_seed(g.seed, "block-" + std::to_string(b)));
    const std::string key = stem_of(track_paths[b]);
    report.add_factorization(key, res);
    write_matrix_csv(join(g.out, "weights_" + key + ".csv"), res.w);
  }
  write_report(report, g.out);
  return 0;
}

int run_match(const std::string& mode, const std::string& cv_path,
              const std::string& emg_path, double rate_hz, double max_lag_s,
              const Globals& g) {
  const Eigen::MatrixXd a = read_matrix_csv(cv_path);
  const Eigen::MatrixXd b = read_matrix_csv(emg_path);
  SynergyMatch m;
  if (mode == "temporal") {
    m = temporal_match(a, b, rate_hz, max_lag_s);
  } else if (mode == "spatial") {
    m = spatial_match(a, b);
  } else {
    throw InvalidArgumentError("mode must be temporal or spatial");
  }
  ReportBuilder report(
      ReportMeta{"match", g.seed, g.jobs, {cv_path, emg_path}});
  report.add_synergy_match("cv_vs_emg", m);
  write_report(report, g.out);
  return 0;
}

int run_agree(const std::string& a_path, const std::string& b_path,
              const Globals& g) {
  const LabelTrack a = read_track_csv(a_path, stem_of(a_path),
                                      Modality::kHuman, TrackKind::kBinary);
  const LabelTrack b = read_track_csv(b_path, stem_of(b_path),
                                      Modality::kHuman, TrackKind::kBinary);
  ReportBuilder report(ReportMeta{"agree", g.seed, g.jobs, {a_path, b_path}});
  add_agreement_pair(report, "a_vs_b", a, b);
  write_report(report, g.out);
  return 0;
}

int run_delay(const std::string& emg_path, const std::string& label_path,
              double max_lag_s, const Globals& g) {
  const LabelTrack env = read_track_csv(emg_path, stem_of(emg_path),
                                        Modality::kEmg,
                                        TrackKind::kContinuous);
  LabelTrack label = read_track_csv(label_path, stem_of(label_path),
                                    Modality::kCv, TrackKind::kContinuous);
  const DelayEstimate d =
      estimate_delay(env.values, env.rate_hz, label, max_lag_s);
  ReportBuilder report(
      ReportMeta{"delay", g.seed, g.jobs, {emg_path, label_path}});
  report.add_delay(d);
  write_report(report, g.out);
  return 0;
}

int run_pipeline(const std::string& session_dir, const SimulateFlags& flags,
                 const Globals& g) {
  if (!fs::exists(join(session_dir, "emg.csv")))
    simulate_to_dir(flags, g.seed, session_dir);
  const Block block = load_session_dir(session_dir);

  DetectConfig cfg;
  cfg.seed = g.seed;
  const DetectionResult res = detect_aus(block, cfg);

  ReportBuilder report(
      ReportMeta{"pipeline", g.seed, g.jobs, {session_dir}});
  report_detection(report, block, res, g.seed);

  // Scripted event mix, when the session kept its log.
  if (fs::exists(join(session_dir, "events.csv"))) {
    const auto events = read_events_csv(join(session_dir, "events.csv"));
    std::array<int, kPatternCount> counts{};
    for (const auto& e : events)
      ++counts[static_cast<std::size_t>(e.pattern)];
    for (int p = 0; p < kPatternCount; ++p)
      report.add_integer("events",
                         ausyn::to_string(static_cast<CooccurrencePattern>(p)),
                         counts[static_cast<std::size_t>(p)]);
  }

  // Co-occurrence and onset structure per label source.
  const auto emg_pair = align_tracks(res.au6, res.au12);
  report.add_cooccurrence("emg",
                          classify_cooccurrence(emg_pair.a, emg_pair.b,
                                                block.condition,
                                                Modality::kEmg));
  report.add_onset_profile("emg",
                           onset_aligned_profile(emg_pair.a, emg_pair.b));
  const LabelTrack* truth6 =
      find_track(block.truth_tracks, au::kAu6, TrackKind::kBinary);
  const LabelTrack* truth12 =
      find_track(block.truth_tracks, au::kAu12, TrackKind::kBinary);
  if (truth6 != nullptr && truth12 != nullptr) {
    const auto pair = align_tracks(*truth6, *truth12);
    report.add_cooccurrence(
        "truth", classify_cooccurrence(pair.a, pair.b, block.condition,
                                       Modality::kSynthTruth));
    report.add_onset_profile("truth",
                             onset_aligned_profile(pair.a, pair.b));
  }
  const LabelTrack* cv6b =
      find_track(block.cv_tracks, au::kAu6, TrackKind::kBinary);
  const LabelTrack* cv12b =
      find_track(block.cv_tracks, au::kAu12, TrackKind::kBinary);
  if (cv6b != nullptr && cv12b != nullptr) {
    const auto pair = align_tracks(*cv6b, *cv12b);
    report.add_cooccurrence("cv",
                            classify_cooccurrence(pair.a, pair.b,
                                                  block.condition,
                                                  Modality::kCv));
  }

  // Muscle-level synergy count from the channel envelopes.
  const Recording envelopes = preprocess_emg(block.emg, cfg.preprocess);
  const std::vector<Eigen::MatrixXd> blocks{envelopes.samples()};
  const VafCurve curve = select_synergy_count(
      blocks, static_cast<int>(envelopes.channels()), 0.85,
      derive_seed(g.seed, "synergy"), 10, 1000, 1e-6, g.jobs);
  report.add_vaf_curve(curve);
  report.add_factorization(
      "emg_envelopes",
      nnmf_factorize(blocks[0], curve.selected_k,
                     derive_seed(g.seed, "block-0")));

  // Component activations against the continuous video tracks.
  const LabelTrack* cv6c =
      find_track(block.cv_tracks, au::kAu6, TrackKind::kContinuous);
  const LabelTrack* cv12c =
      find_track(block.cv_tracks, au::kAu12, TrackKind::kContinuous);
  const double rate = block.emg.rate_hz();
  {
    const LabelTrack up6 = upsample_track(*cv6c, rate);
    const LabelTrack up12 = upsample_track(*cv12c, rate);
    const auto n = std::min({static_cast<std::size_t>(
                                 res.component_envelopes.cols()),
                             up6.values.size(), up12.values.size()});
    Eigen::MatrixXd cv_mat(2, static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      cv_mat(0, static_cast<Eigen::Index>(i)) = up6.values[i];
      cv_mat(1, static_cast<Eigen::Index>(i)) = up12.values[i];
    }
    const Eigen::MatrixXd comp =
        res.component_envelopes.leftCols(static_cast<Eigen::Index>(n));
    report.add_synergy_match("cv_vs_components",
                             temporal_match(cv_mat, comp, rate, 1.0));
  }

  // Detected activity next to the video intensities, decimated to the video
  // rate for plotting.
  {
    const double video_rate = cv6c->rate_hz;
    auto decimate = [&](int comp) {
      std::vector<double> row(static_cast<std::size_t>(
          res.component_envelopes.cols()));
      for (Eigen::Index i = 0; i < res.component_envelopes.cols(); ++i)
        row[static_cast<std::size_t>(i)] = res.component_envelopes(comp, i);
      const LabelTrack t = LabelTrack::continuous(std::move(row), rate,
                                                  au::kOther, Modality::kEmg);
      return downsample_continuous_mean(t, video_rate).values;
    };
    report.add_number("fig2", "rate_hz", video_rate);
    report.add_series("fig2", "emg_au6_envelope",
                      decimate(res.assignment.au6_component));
    report.add_series("fig2", "emg_au12_envelope",
                      decimate(res.assignment.au12_component));
    report.add_series("fig2", "cv_au6_intensity", cv6c->values);
    report.add_series("fig2", "cv_au12_intensity", cv12c->values);
  }

  write_report(report, g.out);
  return 0;
}

int run_plot(const std::string& report_path, int figure, const Globals& g) {
  using json = nlohmann::json;
  const json doc = json::parse(read_text_file(report_path));
  ensure_out_dir(g.out);

  char buf[40];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };

  if (figure == 2) {
    if (!doc.contains("fig2"))
      throw InvalidArgumentError("report lacks the fig2 section");
    const json& f = doc["fig2"];
    const double rate = f["rate_hz"].get<double>();
    const auto e6 = f["emg_au6_envelope"].get<std::vector<double>>();
    const auto e12 = f["emg_au12_envelope"].get<std::vector<double>>();
    const auto c6 = f["cv_au6_intensity"].get<std::vector<double>>();
    const auto c12 = f["cv_au12_intensity"].get<std::vector<double>>();
    const std::size_t n =
        std::min({e6.size(), e12.size(), c6.size(), c12.size()});
    std::string out =
        "t_s,emg_au6_envelope,emg_au12_envelope,cv_au6_intensity,"
        "cv_au12_intensity\n";
    for (std::size_t i = 0; i < n; ++i) {
      out += fmt(static_cast<double>(i) / rate) + "," + fmt(e6[i]) + "," +
             fmt(e12[i]) + "," + fmt(c6[i]) + "," + fmt(c12[i]) + "\n";
    }
    write_text_file_atomic(join(g.out, "fig2.csv"), out);
    return 0;
  }
  if (figure == 5) {
    if (!doc.contains("cooccurrence"))
      throw InvalidArgumentError("report lacks a cooccurrence section");
    const json& co = doc["cooccurrence"];
    std::string out = "source,pattern,count,percent\n";
    for (const auto& [key, entry] : co.items()) {
      const json& counts = entry["counts"];
      double total = 0.0;
      for (const auto& [_, v] : counts.items()) total += v.get<double>();
      for (const auto& [pattern, v] : counts.items()) {
        const double c = v.get<double>();
        const double pct = total > 0.0 ? 100.0 * c / total : 0.0;
        out += key + "," + pattern + "," + fmt(c) + "," + fmt(pct) + "\n";
      }
    }
    write_text_file_atomic(join(g.out, "fig5.csv"), out);
    return 0;
  }
  if (figure == 6) {
    if (!doc.contains("onset_profile"))
      throw InvalidArgumentError("report lacks an onset_profile section");
    const json& profiles = doc["onset_profile"];
    std::string out = "source,offset_s,probability\n";
    for (const auto& [key, entry] : profiles.items()) {
      const double rate = entry["rate_hz"].get<double>();
      const double pre_s = entry["pre_s"].get<double>();
      const auto probs = entry["probabilities"].get<std::vector<double>>();
      for (std::size_t i = 0; i < probs.size(); ++i) {
        out += key + "," +
               fmt(static_cast<double>(i) / rate - pre_s) + "," +
               fmt(probs[i]) + "\n";
      }
    }
    write_text_file_atomic(join(g.out, "fig6.csv"), out);
    return 0;
  }
  throw InvalidArgumentError("figure must be 2, 5, or 6");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EMG action unit detection and synergy analysis"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every stochastic stage")
      ->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads for block/seed level work")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SimulateFlags sim_flags;
  auto* sim = app.add_subcommand("simulate",
                                 "Generate a synthetic session with ground "
                                 "truth");
  sim->add_option("--duration", sim_flags.duration_s, "Session length, s")
      ->capture_default_str();
  sim->add_option("--events", sim_flags.events, "Scripted AU events")
      ->capture_default_str();
  sim->add_option("--snr-db", sim_flags.snr_db, "Sensor SNR, dB")
      ->capture_default_str();
  sim->add_option("--lead-ms", sim_flags.lead_ms,
                  "EMG lead over the video labels, ms")
      ->capture_default_str();

  std::string emg_path, openface_path, truth_path,
      ica_input_name = "bandpassed";
  auto* detect = app.add_subcommand("detect",
                                    "Detect AU6/AU12 from an EMG recording");
  detect->add_option("--emg", emg_path, "EMG CSV")->required();
  detect->add_option("--openface", openface_path, "Face tracker CSV")
      ->required();
  detect->add_option("--truth", truth_path, "Ground-truth label CSV");
  detect->add_option("--ica-input", ica_input_name,
                     "Separate on 'bandpassed' or 'envelope' signals")
      ->check(CLI::IsMember({"bandpassed", "envelope"}))
      ->capture_default_str();

  std::string au6_path, au12_path, condition_name = "spontaneous",
                                   modality_name = "emg";
  auto* cooccur = app.add_subcommand("cooccur",
                                     "Classify AU6/AU12 co-occurrence "
                                     "patterns");
  cooccur->add_option("--au6", au6_path, "Binary AU6 track CSV")->required();
  cooccur->add_option("--au12", au12_path, "Binary AU12 track CSV")
      ->required();
  cooccur->add_option("--condition", condition_name,
                      "posed or spontaneous")
      ->capture_default_str();
  cooccur->add_option("--modality", modality_name,
                      "emg, cv, human, or truth")
      ->capture_default_str();

  std::vector<std::string> track_paths;
  int kmax = 16;
  double threshold = 0.85;
  auto* synergy = app.add_subcommand("synergy",
                                     "Select the synergy count across "
                                     "activation blocks");
  synergy->add_option("--tracks", track_paths, "Activation matrix CSVs")
      ->required()
      ->expected(-1);
  synergy->add_option("--kmax", kmax, "Largest factorization rank to try")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synergy->add_option("--threshold", threshold, "Minimum acceptable VAF")
      ->capture_default_str();

  std::string match_mode = "temporal", match_cv, match_emg;
  double match_rate = 30.0, match_lag_s = 1.0;
  auto* match = app.add_subcommand("match",
                                   "Pair synergies across modalities");
  match->add_option("--mode", match_mode, "temporal or spatial")
      ->check(CLI::IsMember({"temporal", "spatial"}))
      ->capture_default_str();
  match->add_option("--cv", match_cv, "First matrix CSV")->required();
  match->add_option("--emg", match_emg, "Second matrix CSV")->required();
  match->add_option("--rate", match_rate, "Row sampling rate, Hz")
      ->capture_default_str();
  match->add_option("--max-lag-s", match_lag_s, "Temporal search window, s")
      ->capture_default_str();

  std::string agree_a, agree_b;
  auto* agree = app.add_subcommand("agree",
                                   "Cohen's kappa between two binary tracks");
  agree->add_option("--a", agree_a, "First track CSV")->required();
  agree->add_option("--b", agree_b, "Second track CSV")->required();

  std::string delay_emg, delay_label;
  double delay_lag_s = 2.0;
  auto* delay = app.add_subcommand("delay",
                                   "Lead of an EMG envelope over a label "
                                   "track");
  delay->add_option("--emg", delay_emg, "EMG envelope track CSV")->required();
  delay->add_option("--label", delay_label, "Label track CSV")->required();
  delay->add_option("--max-lag-s", delay_lag_s, "Search window, s")
      ->capture_default_str();

  std::string session_dir;
  auto* pipeline = app.add_subcommand("pipeline",
                                      "Simulate-or-load a session and run "
                                      "every analysis");
  pipeline->add_option("--session", session_dir, "Session directory")
      ->required();
  pipeline->add_option("--duration", sim_flags.duration_s,
                       "Session length when simulating, s");
  pipeline->add_option("--events", sim_flags.events,
                       "Scripted AU events when simulating");
  pipeline->add_option("--snr-db", sim_flags.snr_db,
                       "Sensor SNR when simulating, dB");
  pipeline->add_option("--lead-ms", sim_flags.lead_ms,
                       "EMG lead when simulating, ms");

  std::string report_path;
  int figure = 2;
  auto* plot = app.add_subcommand("plot",
                                  "Emit figure data series from a report");
  plot->add_option("--report", report_path, "Report JSON")->required();
  plot->add_option("--figure", figure, "2, 5, or 6")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return run_simulate(sim_flags, g);
    if (detect->parsed())
      return run_detect(emg_path, openface_path, truth_path,
                        ica_input_name == "envelope" ? IcaInput::kEnvelope
                                                     : IcaInput::kBandpassed,
                        g);
    if (cooccur->parsed())
      return run_cooccur(au6_path, au12_path, condition_name, modality_name,
                         g);
    if (synergy->parsed()) return run_synergy(track_paths, kmax, threshold, g);
    if (match->parsed())
      return run_match(match_mode, match_cv, match_emg, match_rate,
                       match_lag_s, g);
    if (agree->parsed()) return run_agree(agree_a, agree_b, g);
    if (delay->parsed()) return run_delay(delay_emg, delay_label, delay_lag_s, g);
    if (pipeline->parsed()) return run_pipeline(session_dir, sim_flags, g);
    if (plot->parsed()) return run_plot(report_path, figure, g);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
