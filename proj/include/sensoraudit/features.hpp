#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sensoraudit/ingest.hpp"
#include "sensoraudit/matrix.hpp"

namespace sensoraudit {

enum class Feature {
  kShannonEntropy,
  kSampleEntropy,
  kZeroCrossings,
  kWaveformLength,
  kRms,
  kSlopeSignChanges,
  kMedianFrequency,
  kWaveletEnergy,
  kFractalDimension,
};

inline constexpr std::array<Feature, 9> kAllFeatures{
    Feature::kShannonEntropy,  Feature::kSampleEntropy,     Feature::kZeroCrossings,
    Feature::kWaveformLength,  Feature::kRms,               Feature::kSlopeSignChanges,
    Feature::kMedianFrequency, Feature::kWaveletEnergy,     Feature::kFractalDimension,
};

std::string_view feature_name(Feature f) noexcept;
// Throws kInvalidSpec for unknown names.
Feature parse_feature(std::string_view name);

struct FeatureConfig {
  std::size_t entropy_bins = 128;
  std::size_t sampen_m = 2;
  double sampen_r_coeff = 0.2;
  double zc_threshold = 0.0;
  double ssc_threshold = 0.0;
  std::size_t wavelet_levels = 4;
  std::vector<Feature> enabled_features{kAllFeatures.begin(), kAllFeatures.end()};

  void validate() const;
  // Shortest window every enabled extractor accepts.
  std::size_t min_window() const;
};

void to_json(nlohmann::ordered_json& j, const FeatureConfig& cfg);
void from_json(const nlohmann::ordered_json& j, FeatureConfig& cfg);

// ---------------------------------------------------------------------------
// Per-channel extractors. All are pure; degenerate inputs map to the finite
// conventions documented on each function.

// Base-2 entropy of an equal-width histogram over [min, max]; 0 for a
// constant signal.
double shannon_entropy(std::span<const double> x, std::size_t bins);

struct SampleEntropyResult {
  double value = 0.0;
  bool capped = false;  // no matches at length m or m+1
};

// Tolerance r = r_coeff * sample SD; Chebyshev distance, self-matches
// excluded, N - m templates at both lengths. Throws kWindowTooShort unless
// x.size() > m + 1.
SampleEntropyResult sample_entropy(std::span<const double> x, std::size_t m, double r_coeff);

// Adjacent pairs with x_i * x_{i+1} < 0 and |x_i - x_{i+1}| >= threshold.
std::size_t zero_crossings(std::span<const double> x, double threshold);

double waveform_length(std::span<const double> x);

double rms(std::span<const double> x);

// Interior points with (x_i - x_{i-1}) * (x_i - x_{i+1}) > threshold.
std::size_t slope_sign_changes(std::span<const double> x, double threshold);

// Rectangular-window periodogram, DC excluded; smallest bin frequency whose
// cumulative power reaches half the total. 0 Hz when there is no AC power.
double median_frequency(std::span<const double> x, double fs);

// Sum of squared orthonormal Haar detail coefficients over `levels` levels.
// Odd-length intermediate signals drop their last sample.
double wavelet_energy(std::span<const double> x, std::size_t levels);

// Katz dimension of the planar curve (i, x_i); 1.0 for a constant signal.
double fractal_dimension(std::span<const double> x);

// ---------------------------------------------------------------------------

struct ColumnInfo {
  std::size_t channel = 0;  // 0-based
  Feature feature = Feature::kRms;

  std::string name() const;  // "ch<channel+1>_<feature>"
};

// Channel-major column layout: channel c's features occupy the contiguous
// block [c * |enabled|, (c + 1) * |enabled|).
std::vector<ColumnInfo> column_layout(std::size_t channels, const FeatureConfig& cfg);

// Features of a single channel, in cfg.enabled_features order.
void extract_channel_features(std::span<const double> x, double fs, const FeatureConfig& cfg,
                              std::span<double> out);

std::vector<double> extract_features(const WindowedSample& sample, double fs,
                                     const FeatureConfig& cfg);

struct RowProvenance {
  std::string source_trial;
  std::size_t start_index = 0;
};

struct FeatureMatrix {
  Matrix values;
  std::string class_label;
  std::vector<ColumnInfo> column_index;
  std::vector<RowProvenance> row_provenance;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return column_index.size(); }
};

// Extracts every sample (parallel across `jobs` threads); row i is sample i.
FeatureMatrix build_feature_matrix(std::span<const WindowedSample> samples, double fs,
                                   const FeatureConfig& cfg, unsigned jobs = 1);

// Groups by label preserving input order within each class. The map is keyed
// by label; use class order from the RecordingSet for presentation.
std::map<std::string, FeatureMatrix> build_class_matrices(std::span<const WindowedSample> samples,
                                                          double fs, const FeatureConfig& cfg,
                                                          unsigned jobs = 1);

// CSV `class,trial,start,ch<i>_<feature>,...`, matrices in `class_order`.
std::string feature_matrices_csv(const std::map<std::string, FeatureMatrix>& matrices,
                                 std::span<const std::string> class_order);
nlohmann::ordered_json columns_json(std::span<const ColumnInfo> columns);

}  // namespace sensoraudit
