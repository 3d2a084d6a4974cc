#include "sensoraudit/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sensoraudit/error.hpp"
#include "sensoraudit/parallel.hpp"
#include "sensoraudit/report.hpp"

using nlohmann::ordered_json;

namespace sensoraudit {

std::string_view feature_name(Feature f) noexcept {
  switch (f) {
    case Feature::kShannonEntropy: return "shannon_entropy";
    case Feature::kSampleEntropy: return "sample_entropy";
    case Feature::kZeroCrossings: return "zero_crossings";
    case Feature::kWaveformLength: return "waveform_length";
    case Feature::kRms: return "rms";
    case Feature::kSlopeSignChanges: return "slope_sign_changes";
    case Feature::kMedianFrequency: return "median_frequency";
    case Feature::kWaveletEnergy: return "wavelet_energy";
    case Feature::kFractalDimension: return "fractal_dimension";
  }
  return "unknown";
}

Feature parse_feature(std::string_view name) {
  for (Feature f : kAllFeatures) {
    if (feature_name(f) == name) return f;
  }
  throw AuditError(ErrorCode::kInvalidSpec, "unknown feature '" + std::string(name) + "'");
}

void FeatureConfig::validate() const {
  if (entropy_bins == 0) throw AuditError(ErrorCode::kInvalidSpec, "entropy_bins must be positive");
  if (sampen_m == 0) throw AuditError(ErrorCode::kInvalidSpec, "sampen_m must be positive");
  if (!(sampen_r_coeff > 0.0)) throw AuditError(ErrorCode::kInvalidSpec, "sampen_r_coeff must be positive");
  if (!(zc_threshold >= 0.0) || !(ssc_threshold >= 0.0)) {
    throw AuditError(ErrorCode::kInvalidSpec, "thresholds must be nonnegative");
  }
  if (wavelet_levels == 0) throw AuditError(ErrorCode::kInvalidSpec, "wavelet_levels must be positive");
  if (enabled_features.empty()) throw AuditError(ErrorCode::kInvalidSpec, "no features enabled");
  for (std::size_t i = 0; i < enabled_features.size(); ++i) {
    for (std::size_t j = i + 1; j < enabled_features.size(); ++j) {
      if (enabled_features[i] == enabled_features[j]) {
        throw AuditError(ErrorCode::kInvalidSpec,
                         "feature '" + std::string(feature_name(enabled_features[i])) + "' enabled twice");
      }
    }
  }
}

std::size_t FeatureConfig::min_window() const {
  std::size_t w = 1;
  for (Feature f : enabled_features) {
    switch (f) {
      case Feature::kSampleEntropy: w = std::max(w, sampen_m + 2); break;
      case Feature::kZeroCrossings:
      case Feature::kMedianFrequency:
      case Feature::kWaveletEnergy: w = std::max<std::size_t>(w, 2); break;
      case Feature::kSlopeSignChanges:
      case Feature::kFractalDimension: w = std::max<std::size_t>(w, 3); break;
      default: break;
    }
  }
  return w;
}

void to_json(ordered_json& j, const FeatureConfig& cfg) {
  ordered_json names = ordered_json::array();
  for (Feature f : cfg.enabled_features) names.push_back(feature_name(f));
  j = ordered_json{{"entropy_bins", cfg.entropy_bins},
                   {"sampen_m", cfg.sampen_m},
                   {"sampen_r_coeff", cfg.sampen_r_coeff},
                   {"zc_threshold", cfg.zc_threshold},
                   {"ssc_threshold", cfg.ssc_threshold},
                   {"wavelet_levels", cfg.wavelet_levels},
                   {"enabled_features", std::move(names)}};
}

void from_json(const ordered_json& j, FeatureConfig& cfg) {
  cfg = FeatureConfig{};
  try {
    cfg.entropy_bins = j.value("entropy_bins", cfg.entropy_bins);
    cfg.sampen_m = j.value("sampen_m", cfg.sampen_m);
    cfg.sampen_r_coeff = j.value("sampen_r_coeff", cfg.sampen_r_coeff);
    cfg.zc_threshold = j.value("zc_threshold", cfg.zc_threshold);
    cfg.ssc_threshold = j.value("ssc_threshold", cfg.ssc_threshold);
    cfg.wavelet_levels = j.value("wavelet_levels", cfg.wavelet_levels);
    if (j.contains("enabled_features")) {
      cfg.enabled_features.clear();
      for (const auto& name : j.at("enabled_features")) {
        cfg.enabled_features.push_back(parse_feature(name.get<std::string>()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kInvalidSpec, std::string("feature config: ") + e.what());
  }
  cfg.validate();
}

// ---------------------------------------------------------------------------

double shannon_entropy(std::span<const double> x, std::size_t bins) {
  if (x.empty() || bins == 0) return 0.0;
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  if (!(span > 0.0)) return 0.0;

  std::vector<std::size_t> counts(bins, 0);
  const double scale = static_cast<double>(bins) / span;
  for (double v : x) {
    auto b = static_cast<std::size_t>((v - lo) * scale);
    counts[std::min(b, bins - 1)]++;
  }
  const double n = static_cast<double>(x.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

SampleEntropyResult sample_entropy(std::span<const double> x, std::size_t m, double r_coeff) {
  const std::size_t n = x.size();
  if (n <= m + 1) {
    throw AuditError(ErrorCode::kWindowTooShort,
                     "sample entropy needs more than " + std::to_string(m + 1) + " samples, got " +
                         std::to_string(n));
  }
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double r = r_coeff * std::sqrt(ss / static_cast<double>(n - 1));

  // Templates start at 0 .. n-m-1 for both lengths.
  const std::size_t templates = n - m;
  std::uint64_t b = 0;
  std::uint64_t a = 0;
  for (std::size_t i = 0; i + 1 < templates; ++i) {
    for (std::size_t j = i + 1; j < templates; ++j) {
      std::size_t k = 0;
      while (k < m && std::abs(x[i + k] - x[j + k]) <= r) ++k;
      if (k < m) continue;
      ++b;
      if (std::abs(x[i + m] - x[j + m]) <= r) ++a;
    }
  }
  if (a == 0 || b == 0) {
    const double t = static_cast<double>(templates);
    return {std::log(t * (t - 1.0)), true};
  }
  return {-std::log(static_cast<double>(a) / static_cast<double>(b)), false};
}

std::size_t zero_crossings(std::span<const double> x, double threshold) {
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i] * x[i + 1] < 0.0 && std::abs(x[i] - x[i + 1]) >= threshold) ++count;
  }
  return count;
}

double waveform_length(std::span<const double> x) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) total += std::abs(x[i + 1] - x[i]);
  return total;
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double ss = 0.0;
  for (double v : x) ss += v * v;
  return std::sqrt(ss / static_cast<double>(x.size()));
}

std::size_t slope_sign_changes(std::span<const double> x, double threshold) {
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if ((x[i] - x[i - 1]) * (x[i] - x[i + 1]) > threshold) ++count;
  }
  return count;
}

double median_frequency(std::span<const double> x, double fs) {
  const std::size_t n = x.size();
  if (n < 2 || std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) return 0.0;
  // Removing the mean leaves every non-DC bin unchanged and stops rounding
  // from leaking a large offset into them.
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  // Twiddle table indexed by (k * t) mod n keeps the direct DFT exact to the
  // same rounding for every window of a given length.
  thread_local std::vector<double> cos_table;
  thread_local std::vector<double> sin_table;
  if (cos_table.size() != n) {
    cos_table.resize(n);
    sin_table.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      cos_table[i] = std::cos(angle);
      sin_table[i] = std::sin(angle);
    }
  }
  const std::size_t half = n / 2;
  std::vector<double> power(half + 1, 0.0);
  double total = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    double re = 0.0;
    double im = 0.0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = x[t] - mean;
      re += v * cos_table[idx];
      im -= v * sin_table[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    power[k] = re * re + im * im;
    total += power[k];
  }
  if (!(total > 0.0)) return 0.0;
  double cumulative = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    cumulative += power[k];
    if (cumulative >= 0.5 * total) return static_cast<double>(k) * fs / static_cast<double>(n);
  }
  return static_cast<double>(half) * fs / static_cast<double>(n);
}

double wavelet_energy(std::span<const double> x, std::size_t levels) {
  std::vector<double> approx(x.begin(), x.end());
  double energy = 0.0;
  for (std::size_t level = 0; level < levels && approx.size() >= 2; ++level) {
    const std::size_t pairs = approx.size() / 2;
    for (std::size_t i = 0; i < pairs; ++i) {
      const double a = approx[2 * i];
      const double b = approx[2 * i + 1];
      const double detail = (a - b) / std::numbers::sqrt2;
      energy += detail * detail;
      approx[i] = (a + b) / std::numbers::sqrt2;
    }
    approx.resize(pairs);
  }
  return energy;
}

double fractal_dimension(std::span<const double> x) {
  if (x.size() < 3) return 1.0;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) return 1.0;

  double length = 0.0;
  double extent = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double dx = x[i] - x[i - 1];
    length += std::sqrt(1.0 + dx * dx);
    const double rise = x[i] - x[0];
    extent = std::max(extent, std::sqrt(static_cast<double>(i * i) + rise * rise));
  }
  const double steps = static_cast<double>(x.size() - 1);
  const double denom = std::log10(steps) + std::log10(extent / length);
  // A curve long enough to make the denominator vanish is plane-filling.
  if (!(denom > 0.0)) return 2.0;
  return std::max(1.0, std::log10(steps) / denom);
}

// ---------------------------------------------------------------------------

std::string ColumnInfo::name() const {
  return "ch" + std::to_string(channel + 1) + "_" + std::string(feature_name(feature));
}

std::vector<ColumnInfo> column_layout(std::size_t channels, const FeatureConfig& cfg) {
  std::vector<ColumnInfo> cols;
  cols.reserve(channels * cfg.enabled_features.size());
  for (std::size_t c = 0; c < channels; ++c) {
    for (Feature f : cfg.enabled_features) cols.push_back({c, f});
  }
  return cols;
}

void extract_channel_features(std::span<const double> x, double fs, const FeatureConfig& cfg,
                              std::span<double> out) {
  if (x.size() < cfg.min_window()) {
    throw AuditError(ErrorCode::kWindowTooShort,
                     "window of " + std::to_string(x.size()) + " samples is shorter than the " +
                         std::to_string(cfg.min_window()) + " the enabled features need");
  }
  for (std::size_t i = 0; i < cfg.enabled_features.size(); ++i) {
    double v = 0.0;
    switch (cfg.enabled_features[i]) {
      case Feature::kShannonEntropy: v = shannon_entropy(x, cfg.entropy_bins); break;
      case Feature::kSampleEntropy: v = sample_entropy(x, cfg.sampen_m, cfg.sampen_r_coeff).value; break;
      case Feature::kZeroCrossings: v = static_cast<double>(zero_crossings(x, cfg.zc_threshold)); break;
      case Feature::kWaveformLength: v = waveform_length(x); break;
      case Feature::kRms: v = rms(x); break;
      case Feature::kSlopeSignChanges: v = static_cast<double>(slope_sign_changes(x, cfg.ssc_threshold)); break;
      case Feature::kMedianFrequency: v = median_frequency(x, fs); break;
      case Feature::kWaveletEnergy: v = wavelet_energy(x, cfg.wavelet_levels); break;
      case Feature::kFractalDimension: v = fractal_dimension(x); break;
    }
    out[i] = v;
  }
}

std::vector<double> extract_features(const WindowedSample& sample, double fs, const FeatureConfig& cfg) {
  const std::size_t per = cfg.enabled_features.size();
  std::vector<double> out(sample.channel_count() * per);
  for (std::size_t c = 0; c < sample.channel_count(); ++c) {
    extract_channel_features(sample.data.row(c), fs, cfg, std::span(out).subspan(c * per, per));
  }
  return out;
}

FeatureMatrix build_feature_matrix(std::span<const WindowedSample> samples, double fs,
                                   const FeatureConfig& cfg, unsigned jobs) {
  cfg.validate();
  FeatureMatrix fm;
  if (samples.empty()) return fm;
  const std::size_t channels = samples.front().channel_count();
  fm.class_label = samples.front().class_label;
  fm.column_index = column_layout(channels, cfg);
  fm.values = Matrix(samples.size(), fm.column_index.size());
  for (const auto& s : samples) {
    if (s.channel_count() != channels) {
      throw AuditError(ErrorCode::kInconsistentChannelCount, "samples disagree on channel count");
    }
    fm.row_provenance.push_back({s.source_trial, s.start_index});
  }
  const std::size_t per = cfg.enabled_features.size();
  // One task per (sample, channel); each writes its own cells.
  parallel_for(samples.size() * channels, jobs, [&](std::size_t task) {
    const std::size_t r = task / channels;
    const std::size_t c = task % channels;
    extract_channel_features(samples[r].data.row(c), fs, cfg, fm.values.row(r).subspan(c * per, per));
  });
  return fm;
}

std::map<std::string, FeatureMatrix> build_class_matrices(std::span<const WindowedSample> samples,
                                                          double fs, const FeatureConfig& cfg,
                                                          unsigned jobs) {
  std::map<std::string, std::vector<WindowedSample>> grouped;
  for (const auto& s : samples) grouped[s.class_label].push_back(s);
  std::map<std::string, FeatureMatrix> out;
  for (auto& [label, group] : grouped) {
    out.emplace(label, build_feature_matrix(group, fs, cfg, jobs));
  }
  return out;
}

std::string feature_matrices_csv(const std::map<std::string, FeatureMatrix>& matrices,
                                 std::span<const std::string> class_order) {
  std::vector<std::string> header{"class", "trial", "start"};
  for (const auto& [label, fm] : matrices) {
    for (const auto& col : fm.column_index) header.push_back(col.name());
    break;
  }
  CsvWriter csv(header);
  for (const auto& label : class_order) {
    const auto it = matrices.find(label);
    if (it == matrices.end()) continue;
    const FeatureMatrix& fm = it->second;
    for (std::size_t r = 0; r < fm.rows(); ++r) {
      csv.field(label).field(fm.row_provenance[r].source_trial).field(fm.row_provenance[r].start_index);
      for (double v : fm.values.row(r)) csv.field(v);
      csv.end_row();
    }
  }
  return csv.str();
}

ordered_json columns_json(std::span<const ColumnInfo> columns) {
  ordered_json out = ordered_json::array();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out.push_back({{"column", i},
                   {"name", columns[i].name()},
                   {"channel", columns[i].channel},
                   {"feature", feature_name(columns[i].feature)}});
  }
  return out;
}

}  // namespace sensoraudit
