#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ausyn/signal.hpp"
#include "ausyn/synth.hpp"

namespace ausyn {

// Whole-file helpers. Writes go to a sibling temp file first and rename into
// place, so readers never observe a half-written file.
std::string read_text_file(const std::string& path);
void write_text_file_atomic(const std::string& path,
                            const std::string& content);

// Multichannel EMG, header "t_ms,<ch>,...". Times must be uniform; the rate
// comes from the overall span. Doubles are written with full round-trip
// precision.
Recording read_emg_csv(const std::string& path);
void write_emg_csv(const std::string& path, const Recording& rec);

// Face-tracker output: a timestamp column in seconds plus AU intensity (_r)
// and presence (_c) columns; both the packed and the space-padded header
// styles parse. Intensities clamp at zero, presence must be 0 or 1. Column
// names like "AU06_r" canonicalize to "AU6"; AU6 and AU12 must be present.
// The frame rate comes from the overall timestamp span; irregular spacing is
// a ParseError.
std::vector<LabelTrack> read_openface_csv(const std::string& path);

// Writes tracks (shared rate and length) in the face-tracker layout: frame,
// timestamp, then one zero-padded column per track ("AU6" continuous becomes
// "AU06_r").
void write_openface_csv(const std::string& path,
                        const std::vector<LabelTrack>& tracks);

// Annotated intervals, header "au,onset_ms,offset_ms". Returns one binary
// track per requested AU (every requested AU yields a track, active over the
// union of its intervals); with no explicit request, every AU in the file.
std::vector<LabelTrack> read_interval_labels_csv(
    const std::string& path, double duration_ms, double rate_hz,
    const std::vector<std::string>& aus = {},
    Modality modality = Modality::kHuman);

// Several equal-rate tracks in one file, header "t_ms,<au>,...".
void write_label_tracks_csv(const std::string& path,
                            const std::vector<LabelTrack>& tracks);
std::vector<LabelTrack> read_label_tracks_csv(const std::string& path,
                                              Modality modality,
                                              TrackKind kind);

// Single series, header "t_ms,value". Reading infers the rate from the span.
LabelTrack read_track_csv(const std::string& path, const std::string& au,
                          Modality modality, TrackKind kind);
void write_track_csv(const std::string& path, const LabelTrack& track);

// Bare numeric grid, no header.
Eigen::MatrixXd read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);

// Scripted event log with optional per-AU half-amplitude intervals.
void write_events_csv(const std::string& path,
                      const std::vector<SynthEvent>& events);
std::vector<SynthEvent> read_events_csv(const std::string& path);

}  // namespace ausyn
