#include "sensoraudit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string_view>

#include "sensoraudit/error.hpp"
#include "sensoraudit/report.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace sensoraudit {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kInconsistentChannelCount: return "InconsistentChannelCount";
    case ErrorCode::kUnknownClassLabel: return "UnknownClassLabel";
    case ErrorCode::kTrimExceedsLength: return "TrimExceedsLength";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kWindowTooShort: return "WindowTooShort";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kMismatchedColumns: return "MismatchedColumns";
    case ErrorCode::kTooFewClasses: return "TooFewClasses";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kEmptySpec: return "EmptySpec";
    case ErrorCode::kTopologyMismatch: return "TopologyMismatch";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kSingleClassTraining: return "SingleClassTraining";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kOutputExists: return "OutputExists";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

void RecordingSet::validate() const {
  if (!(sampling_rate_hz > 0.0) || !std::isfinite(sampling_rate_hz)) {
    throw AuditError(ErrorCode::kInvalidSpec, "sampling_rate_hz must be positive");
  }
  if (channel_count == 0) throw AuditError(ErrorCode::kInvalidSpec, "channel_count must be positive");
  for (const auto& rec : recordings) {
    if (rec.channel_count() != channel_count) {
      throw AuditError(ErrorCode::kInconsistentChannelCount,
                       "recording " + rec.participant_id + "/" + rec.session_id + "/" +
                           rec.trial_id + " has " + std::to_string(rec.channel_count()) +
                           " channels, expected " + std::to_string(channel_count));
    }
    if (std::find(class_names.begin(), class_names.end(), rec.class_label) == class_names.end()) {
      throw AuditError(ErrorCode::kUnknownClassLabel, "unknown class label '" + rec.class_label + "'");
    }
    if (rec.length() == 0) throw AuditError(ErrorCode::kMalformedRow, "recording has no samples");
    for (double v : rec.samples.data()) {
      if (!std::isfinite(v)) {
        throw AuditError(ErrorCode::kMalformedRow, "non-finite amplitude in recording " + rec.trial_id);
      }
    }
  }
}

std::size_t SegmentationConfig::stride() const {
  const double raw = static_cast<double>(window_len_samples) * (1.0 - overlap_fraction);
  const double rounded = std::floor(raw + 0.5);
  if (rounded < 1.0) throw AuditError(ErrorCode::kInvalidSpec, "window stride rounds to zero");
  return static_cast<std::size_t>(rounded);
}

void SegmentationConfig::validate() const {
  if (!(trim_head_ms >= 0.0) || !(trim_tail_ms >= 0.0)) {
    throw AuditError(ErrorCode::kInvalidSpec, "trim amounts must be nonnegative");
  }
  if (window_len_samples == 0) throw AuditError(ErrorCode::kInvalidSpec, "window length must be positive");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw AuditError(ErrorCode::kInvalidSpec, "overlap_fraction must be in [0, 1)");
  }
  (void)stride();
}

void to_json(ordered_json& j, const SegmentationConfig& cfg) {
  j = ordered_json{{"trim_head_ms", cfg.trim_head_ms},
                   {"trim_tail_ms", cfg.trim_tail_ms},
                   {"window_len_samples", cfg.window_len_samples},
                   {"overlap_fraction", cfg.overlap_fraction},
                   {"concat_trials_within_session", cfg.concat_trials_within_session}};
}

void from_json(const ordered_json& j, SegmentationConfig& cfg) {
  cfg = SegmentationConfig{};
  cfg.trim_head_ms = j.value("trim_head_ms", cfg.trim_head_ms);
  cfg.trim_tail_ms = j.value("trim_tail_ms", cfg.trim_tail_ms);
  cfg.window_len_samples = j.value("window_len_samples", cfg.window_len_samples);
  cfg.overlap_fraction = j.value("overlap_fraction", cfg.overlap_fraction);
  cfg.concat_trials_within_session =
      j.value("concat_trials_within_session", cfg.concat_trials_within_session);
  cfg.validate();
}

namespace {

std::string_view trim_ws(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim_ws(line.substr(start)));
      return cells;
    }
    cells.push_back(trim_ws(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

bool parse_finite(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc{} && ptr == cell.data() + cell.size() && std::isfinite(out);
}

Recording parse_recording_csv(const fs::path& file, std::size_t expected_channels) {
  const std::string text = read_file(file);
  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const auto nl = rest.find('\n');
      lines.push_back(rest.substr(0, nl));
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  if (lines.empty() || trim_ws(lines[0]).empty()) {
    throw AuditError(ErrorCode::kMalformedRow, file.string() + ":1: missing header");
  }
  const auto header = split_commas(lines[0]);
  if (header.empty() || header[0] != "t") {
    throw AuditError(ErrorCode::kMalformedRow, file.string() + ":1: header must start with 't'");
  }
  const std::size_t channels = header.size() - 1;
  if (channels != expected_channels) {
    throw AuditError(ErrorCode::kInconsistentChannelCount,
                     file.string() + ": header declares " + std::to_string(channels) +
                         " channels, manifest declares " + std::to_string(expected_channels));
  }

  std::vector<std::vector<double>> columns(channels);
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (trim_ws(lines[ln]).empty()) continue;
    const auto cells = split_commas(lines[ln]);
    const std::string where = file.string() + ":" + std::to_string(ln + 1);
    if (cells.size() != channels + 1) {
      throw AuditError(ErrorCode::kMalformedRow, where + ": expected " +
                                                     std::to_string(channels + 1) + " fields, got " +
                                                     std::to_string(cells.size()));
    }
    double value = 0.0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_finite(cells[c], value)) {
        throw AuditError(ErrorCode::kMalformedRow,
                         where + ": non-numeric value '" + std::string(cells[c]) + "'");
      }
      if (c > 0) columns[c - 1].push_back(value);
    }
  }
  if (channels == 0 || columns[0].empty()) {
    throw AuditError(ErrorCode::kMalformedRow, file.string() + ": no data rows");
  }

  Recording rec;
  rec.samples = Matrix(channels, columns[0].size());
  for (std::size_t c = 0; c < channels; ++c) {
    std::copy(columns[c].begin(), columns[c].end(), rec.samples.row(c).begin());
  }
  return rec;
}

}  // namespace

RecordingSet load_dataset(const fs::path& root, const DatasetLayout& layout) {
  if (!fs::is_directory(root)) {
    throw AuditError(ErrorCode::kMissingFile, "dataset root not found: " + root.string());
  }
  const fs::path manifest_path = root / layout.manifest_name;
  if (!fs::is_regular_file(manifest_path)) {
    throw AuditError(ErrorCode::kMissingFile, "manifest not found: " + manifest_path.string());
  }

  RecordingSet set;
  try {
    const auto manifest = ordered_json::parse(read_file(manifest_path));
    set.sampling_rate_hz = manifest.at("sampling_rate_hz").get<double>();
    set.class_names = manifest.at("class_names").get<std::vector<std::string>>();
    set.channel_count = manifest.at("channel_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kInvalidSpec, manifest_path.string() + ": " + e.what());
  }
  if (set.class_names.empty()) throw AuditError(ErrorCode::kInvalidSpec, "manifest lists no classes");

  // <participant>/<session>/<class>_<trial><ext>, visited in lexicographic order.
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != layout.extension) continue;
    const fs::path rel = fs::relative(entry.path(), root);
    if (std::distance(rel.begin(), rel.end()) != 3) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
  if (files.empty()) throw AuditError(ErrorCode::kMissingFile, "no recordings under " + root.string());

  for (const auto& rel : files) {
    auto part = rel.begin();
    Recording meta;
    meta.participant_id = (part++)->string();
    meta.session_id = (part++)->string();
    const std::string stem = rel.stem().string();
    const auto underscore = stem.rfind('_');
    if (underscore == std::string::npos || underscore == 0) {
      throw AuditError(ErrorCode::kUnknownClassLabel,
                       (root / rel).string() + ": file name is not <class>_<trial>");
    }
    meta.class_label = stem.substr(0, underscore);
    meta.trial_id = stem.substr(underscore + 1);
    if (std::find(set.class_names.begin(), set.class_names.end(), meta.class_label) ==
        set.class_names.end()) {
      throw AuditError(ErrorCode::kUnknownClassLabel,
                       (root / rel).string() + ": class '" + meta.class_label + "' not in manifest");
    }
    Recording rec = parse_recording_csv(root / rel, set.channel_count);
    rec.class_label = std::move(meta.class_label);
    rec.trial_id = std::move(meta.trial_id);
    rec.session_id = std::move(meta.session_id);
    rec.participant_id = std::move(meta.participant_id);
    set.recordings.push_back(std::move(rec));
  }
  set.validate();
  return set;
}

void write_dataset(const RecordingSet& set, const fs::path& root, bool overwrite,
                   const DatasetLayout& layout) {
  set.validate();
  const fs::path manifest_path = root / layout.manifest_name;
  if (fs::exists(manifest_path) && !overwrite) {
    throw AuditError(ErrorCode::kOutputExists,
                     manifest_path.string() + " exists (pass overwrite to replace)");
  }
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw AuditError(ErrorCode::kIoError, "cannot create " + root.string() + ": " + ec.message());

  ordered_json manifest{{"sampling_rate_hz", set.sampling_rate_hz},
                        {"class_names", set.class_names},
                        {"channel_count", set.channel_count}};
  write_file(manifest_path, manifest.dump(2) + "\n");

  std::vector<std::string> header{"t"};
  for (std::size_t c = 0; c < set.channel_count; ++c) header.push_back("ch" + std::to_string(c + 1));
  for (const auto& rec : set.recordings) {
    const fs::path dir = root / rec.participant_id / rec.session_id;
    fs::create_directories(dir, ec);
    if (ec) throw AuditError(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
    CsvWriter csv(header);
    for (std::size_t t = 0; t < rec.length(); ++t) {
      csv.field(static_cast<double>(t) / set.sampling_rate_hz);
      for (std::size_t c = 0; c < rec.channel_count(); ++c) csv.field(rec.samples(c, t));
      csv.end_row();
    }
    write_file(dir / (rec.class_label + "_" + rec.trial_id + layout.extension), csv.str());
  }
}

std::size_t ms_to_samples(double ms, double fs) {
  return static_cast<std::size_t>(std::floor(ms * fs / 1000.0 + 0.5));
}

Recording trim(const Recording& recording, const SegmentationConfig& cfg, double fs) {
  const std::size_t head = ms_to_samples(cfg.trim_head_ms, fs);
  const std::size_t tail = ms_to_samples(cfg.trim_tail_ms, fs);
  const std::size_t length = recording.length();
  if (head + tail >= length) {
    throw AuditError(ErrorCode::kTrimExceedsLength,
                     "trimming " + std::to_string(head) + "+" + std::to_string(tail) +
                         " samples from a " + std::to_string(length) + "-sample trial " +
                         recording.trial_id + " leaves nothing");
  }
  Recording out = recording;
  const std::size_t kept = length - head - tail;
  out.samples = Matrix(recording.channel_count(), kept);
  for (std::size_t c = 0; c < recording.channel_count(); ++c) {
    const auto src = recording.samples.row(c).subspan(head, kept);
    std::copy(src.begin(), src.end(), out.samples.row(c).begin());
  }
  return out;
}

namespace {

std::string trial_key(const Recording& rec) {
  return rec.participant_id + "/" + rec.session_id + "/" + rec.class_label + "_" + rec.trial_id;
}

}  // namespace

std::vector<WindowedSample> window(const Recording& recording, const SegmentationConfig& cfg) {
  const std::size_t w = cfg.window_len_samples;
  const std::size_t stride = cfg.stride();
  const std::size_t length = recording.length();
  std::vector<WindowedSample> out;
  if (w == 0 || length < w) return out;
  out.reserve((length - w) / stride + 1);
  for (std::size_t start = 0; start + w <= length; start += stride) {
    WindowedSample ws;
    ws.data = Matrix(recording.channel_count(), w);
    for (std::size_t c = 0; c < recording.channel_count(); ++c) {
      const auto src = recording.samples.row(c).subspan(start, w);
      std::copy(src.begin(), src.end(), ws.data.row(c).begin());
    }
    ws.class_label = recording.class_label;
    ws.source_trial = trial_key(recording);
    ws.start_index = start;
    out.push_back(std::move(ws));
  }
  return out;
}

std::vector<WindowedSample> segment(const RecordingSet& set, const SegmentationConfig& cfg) {
  cfg.validate();
  std::vector<Recording> trimmed;
  trimmed.reserve(set.recordings.size());
  for (const auto& rec : set.recordings) trimmed.push_back(trim(rec, cfg, set.sampling_rate_hz));

  std::vector<Recording> units;
  if (!cfg.concat_trials_within_session) {
    units = std::move(trimmed);
  } else {
    // Group by (participant, session, class) in first-appearance order.
    std::map<std::string, std::size_t> group_of;
    std::vector<std::vector<const Recording*>> groups;
    for (const auto& rec : trimmed) {
      const std::string key = rec.participant_id + '\x1f' + rec.session_id + '\x1f' + rec.class_label;
      auto [it, inserted] = group_of.emplace(key, groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(&rec);
    }
    for (const auto& group : groups) {
      if (group.size() == 1) {
        units.push_back(*group.front());
        continue;
      }
      std::size_t total = 0;
      std::string trials;
      for (const Recording* r : group) {
        total += r->length();
        trials += (trials.empty() ? "" : "+") + r->trial_id;
      }
      Recording joined;
      joined.class_label = group.front()->class_label;
      joined.participant_id = group.front()->participant_id;
      joined.session_id = group.front()->session_id;
      joined.trial_id = trials;
      joined.samples = Matrix(set.channel_count, total);
      std::size_t offset = 0;
      for (const Recording* r : group) {
        for (std::size_t c = 0; c < set.channel_count; ++c) {
          const auto src = r->samples.row(c);
          std::copy(src.begin(), src.end(), joined.samples.row(c).begin() + static_cast<std::ptrdiff_t>(offset));
        }
        offset += r->length();
      }
      units.push_back(std::move(joined));
    }
  }

  std::vector<WindowedSample> out;
  for (const auto& unit : units) {
    auto windows = window(unit, cfg);
    std::move(windows.begin(), windows.end(), std::back_inserter(out));
  }
  return out;
}

}  // namespace sensoraudit
