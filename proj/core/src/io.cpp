#include "ausyn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include "ausyn/cooccur.hpp"
#include "ausyn/error.hpp"

namespace ausyn {
namespace {

namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    const std::string_view field = comma == std::string_view::npos
                                       ? line.substr(pos)
                                       : line.substr(pos, comma - pos);
    out.emplace_back(trim(field));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::size_t line) {
  const std::string_view t = trim(field);
  double v = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || t.empty())
    throw ParseError("bad number '" + std::string(field) + "'", line);
  if (!std::isfinite(v))
    throw ParseError("non-finite value '" + std::string(field) + "'", line);
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Lines of the file, with 1-based numbers. Blank lines are dropped but keep
// their place in the numbering.
std::vector<std::pair<std::size_t, std::string>> read_lines(
    const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::pair<std::size_t, std::string>> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw =
        nl == std::string::npos
            ? std::string_view(text).substr(pos)
            : std::string_view(text).substr(pos, nl - pos);
    ++line_no;
    if (!trim(raw).empty()) out.emplace_back(line_no, std::string(raw));
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return out;
}

// Infers the rate from the overall span and rejects irregular spacing.
// `unit_per_s` converts the time column into seconds (1000 for ms).
double infer_rate(const std::vector<std::pair<std::size_t, double>>& times,
                  double unit_per_s) {
  if (times.size() < 2)
    throw ParseError("need at least two rows to infer a rate",
                     times.empty() ? 1 : times.front().first);
  const double span = times.back().second - times.front().second;
  if (!(span > 0.0))
    throw ParseError("timestamps must increase", times.back().first);
  const double mean_dt = span / static_cast<double>(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double dt = times[i].second - times[i - 1].second;
    if (dt <= 0.0)
      throw ParseError("timestamps must increase", times[i].first);
    if (std::abs(dt - mean_dt) > 0.25 * mean_dt)
      throw ParseError("irregular timestamp spacing", times[i].first);
  }
  return unit_per_s / mean_dt;
}

std::optional<std::pair<std::string, TrackKind>> parse_au_column(
    std::string_view name) {
  if (name.size() < 5 || name.substr(0, 2) != "AU") return std::nullopt;
  const std::string_view suffix = name.substr(name.size() - 2);
  TrackKind kind;
  if (suffix == "_r") {
    kind = TrackKind::kContinuous;
  } else if (suffix == "_c") {
    kind = TrackKind::kBinary;
  } else {
    return std::nullopt;
  }
  const std::string_view digits = name.substr(2, name.size() - 4);
  if (digits.empty()) return std::nullopt;
  int index = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    index = index * 10 + (c - '0');
  }
  return std::make_pair("AU" + std::to_string(index), kind);
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path);
  return ss.str();
}

void write_text_file_atomic(const std::string& path,
                            const std::string& content) {
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out.good()) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move " + tmp.string() + " into place: " +
                  ec.message());
  }
}

Recording read_emg_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file", 1);
  const auto header = split_csv(lines.front().second);
  if (header.size() < 2 || header[0] != "t_ms")
    throw ParseError("expected header t_ms,<channel>,...",
                     lines.front().first);
  const std::size_t n_ch = header.size() - 1;
  std::vector<std::string> names(header.begin() + 1, header.end());

  std::vector<std::pair<std::size_t, double>> times;
  std::vector<double> flat;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [line_no, text] = lines[r];
    const auto fields = split_csv(text);
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    times.emplace_back(line_no, parse_double(fields[0], line_no));
    for (std::size_t c = 1; c < fields.size(); ++c)
      flat.push_back(parse_double(fields[c], line_no));
  }
  const double rate = infer_rate(times, 1000.0);
  const auto n = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n_ch), n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n_ch; ++c)
      m(static_cast<Eigen::Index>(c), i) =
          flat[static_cast<std::size_t>(i) * n_ch + c];
  return Recording(std::move(m), rate, std::move(names),
                   times.front().second);
}

void write_emg_csv(const std::string& path, const Recording& rec) {
  std::string out = "t_ms";
  for (const auto& name : rec.channel_names()) out += "," + name;
  out += "\n";
  const double dt_ms = 1000.0 / rec.rate_hz();
  for (Eigen::Index i = 0; i < rec.length(); ++i) {
    out += format_double(rec.start_time_ms() +
                         static_cast<double>(i) * dt_ms);
    for (Eigen::Index c = 0; c < rec.channels(); ++c)
      out += "," + format_double(rec.samples()(c, i));
    out += "\n";
  }
  write_text_file_atomic(path, out);
}

std::vector<LabelTrack> read_openface_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file", 1);
  const auto header = split_csv(lines.front().second);

  std::size_t time_col = header.size();
  struct AuColumn {
    std::size_t col;
    std::string au;
    TrackKind kind;
  };
  std::vector<AuColumn> au_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "timestamp") time_col = c;
    if (auto parsed = parse_au_column(header[c]))
      au_cols.push_back({c, parsed->first, parsed->second});
  }
  if (time_col == header.size())
    throw ParseError("missing timestamp column", lines.front().first);
  if (au_cols.empty())
    throw ParseError("no AU columns found", lines.front().first);
  bool has6 = false, has12 = false;
  for (const auto& c : au_cols) {
    has6 = has6 || c.au == au::kAu6;
    has12 = has12 || c.au == au::kAu12;
  }
  if (!has6 || !has12)
    throw ParseError("missing required AU06/AU12 columns",
                     lines.front().first);

  std::vector<std::pair<std::size_t, double>> times;
  std::vector<std::vector<double>> values(au_cols.size());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [line_no, text] = lines[r];
    const auto fields = split_csv(text);
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    times.emplace_back(line_no, parse_double(fields[time_col], line_no));
    for (std::size_t k = 0; k < au_cols.size(); ++k) {
      double v = parse_double(fields[au_cols[k].col], line_no);
      if (au_cols[k].kind == TrackKind::kBinary) {
        if (std::abs(v) > 1e-9 && std::abs(v - 1.0) > 1e-9)
          throw ParseError("presence value must be 0 or 1, got '" +
                               fields[au_cols[k].col] + "'",
                           line_no);
        v = std::abs(v) > 0.5 ? 1.0 : 0.0;
      } else {
        v = std::max(0.0, v);
      }
      values[k].push_back(v);
    }
  }
  const double rate = infer_rate(times, 1.0);

  std::vector<LabelTrack> tracks;
  tracks.reserve(au_cols.size());
  for (std::size_t k = 0; k < au_cols.size(); ++k) {
    tracks.push_back(au_cols[k].kind == TrackKind::kBinary
                         ? LabelTrack::binary(std::move(values[k]), rate,
                                              au_cols[k].au, Modality::kCv)
                         : LabelTrack::continuous(std::move(values[k]), rate,
                                                  au_cols[k].au,
                                                  Modality::kCv));
  }
  return tracks;
}

void write_openface_csv(const std::string& path,
                        const std::vector<LabelTrack>& tracks) {
  if (tracks.empty()) throw InvalidArgumentError("no tracks to write");
  const double rate = tracks.front().rate_hz;
  const std::size_t n = tracks.front().values.size();
  for (const auto& t : tracks) {
    validate(t);
    if (t.rate_hz != rate || t.values.size() != n)
      throw InvalidArgumentError("tracks must share rate and length");
  }

  auto column_name = [](const LabelTrack& t) {
    if (t.au.size() < 3 || t.au.substr(0, 2) != "AU")
      throw InvalidArgumentError("track AU name is not exportable: " + t.au);
    const std::string digits = t.au.substr(2);
    const std::string padded = digits.size() < 2 ? "0" + digits : digits;
    return "AU" + padded +
           (t.kind == TrackKind::kBinary ? "_c" : "_r");
  };

  std::string out = "frame,timestamp";
  for (const auto& t : tracks) out += "," + column_name(t);
  out += "\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += std::to_string(i + 1);
    out += "," + format_double(static_cast<double>(i) / rate);
    for (const auto& t : tracks) out += "," + format_double(t.values[i]);
    out += "\n";
  }
  write_text_file_atomic(path, out);
}

void write_label_tracks_csv(const std::string& path,
                            const std::vector<LabelTrack>& tracks) {
  if (tracks.empty()) throw InvalidArgumentError("no tracks to write");
  const double rate = tracks.front().rate_hz;
  const std::size_t n = tracks.front().values.size();
  for (const auto& t : tracks) {
    validate(t);
    if (t.rate_hz != rate || t.values.size() != n)
      throw InvalidArgumentError("tracks must share rate and length");
  }
  std::string out = "t_ms";
  for (const auto& t : tracks) out += "," + t.au;
  out += "\n";
  const double dt_ms = 1000.0 / rate;
  for (std::size_t i = 0; i < n; ++i) {
    out += format_double(static_cast<double>(i) * dt_ms);
    for (const auto& t : tracks) out += "," + format_double(t.values[i]);
    out += "\n";
  }
  write_text_file_atomic(path, out);
}

std::vector<LabelTrack> read_label_tracks_csv(const std::string& path,
                                              Modality modality,
                                              TrackKind kind) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file", 1);
  const auto header = split_csv(lines.front().second);
  if (header.size() < 2 || header[0] != "t_ms")
    throw ParseError("expected header t_ms,<au>,...", lines.front().first);

  std::vector<std::pair<std::size_t, double>> times;
  std::vector<std::vector<double>> values(header.size() - 1);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [line_no, text] = lines[r];
    const auto fields = split_csv(text);
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no);
    times.emplace_back(line_no, parse_double(fields[0], line_no));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double v = parse_double(fields[c], line_no);
      if (kind == TrackKind::kBinary) {
        if (std::abs(v) > 1e-9 && std::abs(v - 1.0) > 1e-9)
          throw ParseError("binary value must be 0 or 1, got '" + fields[c] +
                               "'",
                           line_no);
        v = std::abs(v) > 0.5 ? 1.0 : 0.0;
      }
      values[c - 1].push_back(v);
    }
  }
  const double rate = infer_rate(times, 1000.0);
  std::vector<LabelTrack> tracks;
  tracks.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    tracks.push_back(
        kind == TrackKind::kBinary
            ? LabelTrack::binary(std::move(values[k]), rate, header[k + 1],
                                 modality)
            : LabelTrack::continuous(std::move(values[k]), rate,
                                     header[k + 1], modality));
  }
  return tracks;
}

std::vector<LabelTrack> read_interval_labels_csv(
    const std::string& path, double duration_ms, double rate_hz,
    const std::vector<std::string>& aus, Modality modality) {
  if (!(duration_ms > 0.0) || !(rate_hz > 0.0))
    throw InvalidArgumentError("duration and rate must be positive");
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file", 1);
  const auto header = split_csv(lines.front().second);
  if (header.size() != 3 || header[0] != "au" || header[1] != "onset_ms" ||
      header[2] != "offset_ms")
    throw ParseError("expected header au,onset_ms,offset_ms",
                     lines.front().first);

  struct Interval {
    double onset, offset;
  };
  std::vector<std::string> order;
  std::vector<std::vector<Interval>> per_au;
  auto slot = [&](const std::string& au) -> std::vector<Interval>& {
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] == au) return per_au[i];
    order.push_back(au);
    per_au.emplace_back();
    return per_au.back();
  };

  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [line_no, text] = lines[r];
    const auto fields = split_csv(text);
    if (fields.size() != 3)
      throw ParseError("expected 3 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    if (fields[0].empty()) throw ParseError("empty AU name", line_no);
    const double on = parse_double(fields[1], line_no);
    const double off = parse_double(fields[2], line_no);
    if (off <= on) throw ParseError("offset must exceed onset", line_no);
    slot(fields[0]).push_back({on, off});
  }

  const std::vector<std::string>& want = aus.empty() ? order : aus;
  const auto n = static_cast<std::size_t>(
      std::llround(duration_ms / 1000.0 * rate_hz));
  if (n == 0) throw InvalidArgumentError("zero-length label window");

  std::vector<LabelTrack> tracks;
  tracks.reserve(want.size());
  for (const auto& au : want) {
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (order[i] != au) continue;
      for (const auto& iv : per_au[i]) {
        for (std::size_t s = 0; s < n; ++s) {
          const double t = static_cast<double>(s) * 1000.0 / rate_hz;
          if (t >= iv.onset && t < iv.offset) v[s] = 1.0;
        }
      }
    }
    tracks.push_back(LabelTrack::binary(std::move(v), rate_hz, au, modality));
  }
  return tracks;
}

LabelTrack read_track_csv(const std::string& path, const std::string& au,
                          Modality modality, TrackKind kind) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file", 1);
  const auto header = split_csv(lines.front().second);
  if (header.size() != 2 || header[0] != "t_ms" || header[1] != "value")
    throw ParseError("expected header t_ms,value", lines.front().first);

  std::vector<std::pair<std::size_t, double>> times;
  std::vector<double> values;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [line_no, text] = lines[r];
    const auto fields = split_csv(text);
    if (fields.size() != 2)
      throw ParseError("expected 2 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    times.emplace_back(line_no, parse_double(fields[0], line_no));
    double v = parse_double(fields[1], line_no);
    if (kind == TrackKind::kBinary) {
      if (std::abs(v) > 1e-9 && std::abs(v - 1.0) > 1e-9)
        throw ParseError("binary value must be 0 or 1, got '" + fields[1] +
                             "'",
                         line_no);
      v = std::abs(v) > 0.5 ? 1.0 : 0.0;
    }
    values.push_back(v);
  }
  const double rate = infer_rate(times, 1000.0);
  return kind == TrackKind::kBinary
             ? LabelTrack::binary(std::move(values), rate, au, modality)
             : LabelTrack::continuous(std::move(values), rate, au, modality);
}

void write_track_csv(const std::string& path, const LabelTrack& track) {
  validate(track);
  std::string out = "t_ms,value\n";
  const double dt_ms = 1000.0 / track.rate_hz;
  for (std::size_t i = 0; i < track.values.size(); ++i) {
    out += format_double(static_cast<double>(i) * dt_ms);
    out += ",";
    out += format_double(track.values[i]);
    out += "\n";
  }
  write_text_file_atomic(path, out);
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file", 1);
  std::vector<std::vector<double>> rows;
  for (const auto& [line_no, text] : lines) {
    const auto fields = split_csv(text);
    if (!rows.empty() && fields.size() != rows.front().size())
      throw ParseError("ragged row: expected " +
                           std::to_string(rows.front().size()) + " fields",
                       line_no);
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, line_no));
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
  return m;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  if (m.size() == 0) throw InvalidArgumentError("refusing to write an empty matrix");
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out += ",";
      out += format_double(m(r, c));
    }
    out += "\n";
  }
  write_text_file_atomic(path, out);
}

void write_events_csv(const std::string& path,
                      const std::vector<SynthEvent>& events) {
  std::string out =
      "pattern,onset_ms,offset_ms,au6_onset_ms,au6_offset_ms,au12_onset_ms,"
      "au12_offset_ms\n";
  for (const auto& e : events) {
    out += to_string(e.pattern);
    out += "," + format_double(e.onset_ms) + "," + format_double(e.offset_ms);
    if (e.au6) {
      out += "," + format_double(e.au6->onset_ms) + "," +
             format_double(e.au6->offset_ms);
    } else {
      out += ",,";
    }
    if (e.au12) {
      out += "," + format_double(e.au12->onset_ms) + "," +
             format_double(e.au12->offset_ms);
    } else {
      out += ",,";
    }
    out += "\n";
  }
  write_text_file_atomic(path, out);
}

std::vector<SynthEvent> read_events_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError("empty file", 1);
  const auto header = split_csv(lines.front().second);
  if (header.size() != 7 || header[0] != "pattern")
    throw ParseError("expected the 7-column event header",
                     lines.front().first);

  auto interval = [](const std::string& a, const std::string& b,
                     std::size_t line_no) -> std::optional<AuInterval> {
    if (a.empty() != b.empty())
      throw ParseError("half-specified interval", line_no);
    if (a.empty()) return std::nullopt;
    return AuInterval{parse_double(a, line_no), parse_double(b, line_no)};
  };

  std::vector<SynthEvent> events;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [line_no, text] = lines[r];
    const auto fields = split_csv(text);
    if (fields.size() != 7)
      throw ParseError("expected 7 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    SynthEvent e;
    try {
      e.pattern = pattern_from_string(fields[0]);
    } catch (const InvalidArgumentError&) {
      throw ParseError("unknown pattern '" + fields[0] + "'", line_no);
    }
    e.onset_ms = parse_double(fields[1], line_no);
    e.offset_ms = parse_double(fields[2], line_no);
    e.au6 = interval(fields[3], fields[4], line_no);
    e.au12 = interval(fields[5], fields[6], line_no);
    events.push_back(e);
  }
  return events;
}

}  // namespace ausyn
