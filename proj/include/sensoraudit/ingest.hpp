#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensoraudit/matrix.hpp"

namespace sensoraudit {

// One trial of one class: channels x T amplitudes.
struct Recording {
  Matrix samples;
  std::string class_label;
  std::string trial_id;
  std::string session_id;
  std::string participant_id;

  std::size_t channel_count() const noexcept { return samples.rows(); }
  std::size_t length() const noexcept { return samples.cols(); }
};

struct RecordingSet {
  std::vector<Recording> recordings;
  double sampling_rate_hz = 0.0;
  std::vector<std::string> class_names;
  std::size_t channel_count = 0;

  // Throws AuditError if any invariant is broken.
  void validate() const;
};

struct WindowedSample {
  Matrix data;
  std::string class_label;
  std::string source_trial;
  std::size_t start_index = 0;

  std::size_t channel_count() const noexcept { return data.rows(); }
  std::size_t length() const noexcept { return data.cols(); }
};

struct SegmentationConfig {
  double trim_head_ms = 600.0;
  double trim_tail_ms = 600.0;
  std::size_t window_len_samples = 400;
  double overlap_fraction = 0.5;
  bool concat_trials_within_session = true;

  // round(window_len * (1 - overlap)); throws kInvalidSpec if it is < 1.
  std::size_t stride() const;
  void validate() const;
};

void to_json(nlohmann::ordered_json& j, const SegmentationConfig& cfg);
void from_json(const nlohmann::ordered_json& j, SegmentationConfig& cfg);

// Naming convention of an on-disk dataset. Files live at
// <root>/<participant>/<session>/<class>_<trial><extension>.
struct DatasetLayout {
  std::string manifest_name = "dataset.json";
  std::string extension = ".csv";
};

RecordingSet load_dataset(const std::filesystem::path& root,
                          const DatasetLayout& layout = {});

// Writes `set` in the layout load_dataset reads. Existing files are replaced
// only when `overwrite` is set.
void write_dataset(const RecordingSet& set, const std::filesystem::path& root,
                   bool overwrite, const DatasetLayout& layout = {});

// Milliseconds to samples, rounding halves up.
std::size_t ms_to_samples(double ms, double fs);

Recording trim(const Recording& recording, const SegmentationConfig& cfg, double fs);

std::vector<WindowedSample> window(const Recording& recording,
                                   const SegmentationConfig& cfg);

// trim -> optional same-session concatenation -> window, over a whole set.
// Recordings are visited in their stored order; window order is
// deterministic.
std::vector<WindowedSample> segment(const RecordingSet& set,
                                    const SegmentationConfig& cfg);

// ---------------------------------------------------------------------------
// Synthetic recordings

// Per-channel signal model. For class c a trial of this channel is
//   x(t) = a * m(t) * (noise_mix * b(t) + (1 - noise_mix) * sqrt(2) sin(2 pi f t + phi))
//          + noise_floor * w(t)
// where a = gains[c] * exp(gain_spread * N(0,1)) is drawn once per trial,
// m(t) = 1 + modulation_depth * sin(2 pi modulation_hz t + psi) is a slow
// amplitude envelope, b(t) is unit-variance low-pass noise and w(t) is white
// noise. A channel with equal gains for every class is class-independent.
struct ChannelModel {
  std::vector<double> gains;  // one per class
  double gain_spread = 0.2;
  double tone_hz = 20.0;
  double noise_mix = 0.5;
  double noise_cutoff_hz = 40.0;
  double modulation_depth = 0.3;
  double modulation_hz = 1.0;
  double noise_floor = 0.05;
};

struct SyntheticSpec {
  std::vector<std::string> class_names;
  std::vector<ChannelModel> channels;
  double sampling_rate_hz = 200.0;
  std::size_t trials_per_class = 60;
  std::size_t samples_per_trial = 640;
  // ADC resolution: samples are rounded to the nearest multiple. 0 disables.
  double quantization_step = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

void to_json(nlohmann::ordered_json& j, const SyntheticSpec& spec);
// Accepts `windows_per_class` as an alias for trials_per_class: the default
// samples_per_trial yields exactly one default-segmentation window per trial.
void from_json(const nlohmann::ordered_json& j, SyntheticSpec& spec);

// Each trial is placed in its own session so same-session concatenation
// never joins independent trials.
RecordingSet generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace sensoraudit
