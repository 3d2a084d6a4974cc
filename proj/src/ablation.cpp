#include "sensoraudit/ablation.hpp"

#include <algorithm>
#include <numeric>

#include "sensoraudit/error.hpp"
#include "sensoraudit/parallel.hpp"
#include "sensoraudit/report.hpp"

using nlohmann::ordered_json;

namespace sensoraudit {

void to_json(ordered_json& j, const AblationSpec& spec) {
  ordered_json subsets = ordered_json::array();
  for (const auto& s : spec.sensor_subsets) subsets.push_back(s);
  j = ordered_json{{"sensor_subsets", std::move(subsets)},
                   {"combinatorial_depth", spec.combinatorial_depth},
                   {"shift_metric", metric_name(spec.shift_metric)},
                   {"classes", spec.classes},
                   {"ring_topology", spec.ring_topology ? ordered_json(*spec.ring_topology) : ordered_json(nullptr)},
                   {"criticality_threshold", spec.criticality_threshold},
                   {"redundancy_threshold", spec.redundancy_threshold}};
}

void from_json(const ordered_json& j, AblationSpec& spec) {
  spec = AblationSpec{};
  try {
    if (j.contains("sensor_subsets")) {
      for (const auto& s : j.at("sensor_subsets")) spec.sensor_subsets.push_back(s.get<SensorSet>());
    }
    spec.combinatorial_depth = j.value("combinatorial_depth", spec.combinatorial_depth);
    if (j.contains("shift_metric")) spec.shift_metric = parse_metric(j.at("shift_metric").get<std::string>());
    spec.classes = j.value("classes", spec.classes);
    if (j.contains("ring_topology") && !j.at("ring_topology").is_null()) {
      spec.ring_topology = j.at("ring_topology").get<std::vector<std::size_t>>();
    }
    spec.criticality_threshold = j.value("criticality_threshold", spec.criticality_threshold);
    spec.redundancy_threshold = j.value("redundancy_threshold", spec.redundancy_threshold);
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kInvalidSpec, std::string("ablation spec: ") + e.what());
  }
}

std::vector<SensorSet> enumerate_subsets(std::size_t sensors, std::size_t depth) {
  std::vector<SensorSet> out;
  for (std::size_t size = 1; size <= std::min(depth, sensors); ++size) {
    // Lexicographic combinations of `size` indices.
    SensorSet combo(size);
    std::iota(combo.begin(), combo.end(), 0);
    for (;;) {
      out.push_back(combo);
      std::size_t i = size;
      while (i > 0 && combo[i - 1] == sensors - size + (i - 1)) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t k = i; k < size; ++k) combo[k] = combo[k - 1] + 1;
    }
  }
  return out;
}

std::string subset_label(const SensorSet& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += '+';
    out += std::to_string(s[i]);
  }
  return out;
}

WindowedSample nullify(const WindowedSample& sample, const SensorSet& sensors) {
  WindowedSample out = sample;
  for (std::size_t c : sensors) {
    if (c >= sample.channel_count()) {
      throw AuditError(ErrorCode::kIndexOutOfRange,
                       "sensor " + std::to_string(c) + " out of range for " +
                           std::to_string(sample.channel_count()) + " channels");
    }
    auto row = out.data.row(c);
    std::fill(row.begin(), row.end(), 0.0);
  }
  return out;
}

double criticality_score(double raw_shift, ShiftMetric metric) noexcept {
  return metric == ShiftMetric::kF2 ? 1.0 - raw_shift : raw_shift;
}

namespace {

// Ablated features differ from the baseline only in the nullified channels'
// column blocks, so only those blocks are re-extracted from the nullified
// samples; every other cell is the (bit-identical) baseline value.
Matrix ablated_features(const FeatureMatrix& baseline, std::span<const WindowedSample> samples,
                        const SensorSet& sensors, double fs, const FeatureConfig& fcfg) {
  Matrix out = baseline.values;
  const std::size_t per = fcfg.enabled_features.size();
  for (std::size_t r = 0; r < samples.size(); ++r) {
    const WindowedSample nulled = nullify(samples[r], sensors);
    for (std::size_t c : sensors) {
      extract_channel_features(nulled.data.row(c), fs, fcfg, out.row(r).subspan(c * per, per));
    }
  }
  return out;
}

void check_rows(std::span<const WindowedSample> samples, const std::string& label) {
  if (samples.size() < 2) {
    throw AuditError(ErrorCode::kTooFewRows,
                     "class '" + label + "' has " + std::to_string(samples.size()) +
                         " windows, need at least 2 for ablation");
  }
}

void validate_subset(const SensorSet& s, std::size_t channels) {
  if (s.empty()) throw AuditError(ErrorCode::kEmptySpec, "ablation subsets must be nonempty");
  for (std::size_t c : s) {
    if (c >= channels) {
      throw AuditError(ErrorCode::kIndexOutOfRange,
                       "sensor " + std::to_string(c) + " out of range for " + std::to_string(channels) +
                           " channels");
    }
  }
}

SensorSet normalized_subset(SensorSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace

double ablated_shift(std::span<const WindowedSample> class_samples, const SensorSet& sensors, double fs,
                     const FeatureConfig& fcfg, ShiftMetric metric) {
  check_rows(class_samples, class_samples.empty() ? std::string("?") : class_samples.front().class_label);
  const FeatureMatrix baseline = build_feature_matrix(class_samples, fs, fcfg);
  const Matrix ablated = ablated_features(baseline, class_samples, normalized_subset(sensors), fs, fcfg);
  return metric_value(evaluate_separability(baseline.values, ablated), metric);
}

AblationReport run_ablation_audit(std::span<const WindowedSample> samples, const AblationSpec& spec,
                                  const FeatureConfig& fcfg, double fs,
                                  const std::vector<std::string>& class_order, unsigned jobs) {
  fcfg.validate();
  const std::vector<std::string> classes = spec.classes.empty() ? class_order : spec.classes;
  if (classes.empty()) throw AuditError(ErrorCode::kEmptySpec, "ablation audit has no classes");
  if (samples.empty()) throw AuditError(ErrorCode::kTooFewRows, "ablation audit has no samples");
  const std::size_t channels = samples.front().channel_count();

  std::vector<SensorSet> subsets;
  if (spec.sensor_subsets.empty()) {
    if (spec.combinatorial_depth == 0) throw AuditError(ErrorCode::kEmptySpec, "combinatorial_depth must be >= 1");
    subsets = enumerate_subsets(channels, spec.combinatorial_depth);
  } else {
    for (const auto& s : spec.sensor_subsets) {
      validate_subset(s, channels);
      subsets.push_back(normalized_subset(s));
    }
  }
  // Singletons always run; criticality and ranking are built from them.
  for (std::size_t c = 0; c < channels; ++c) subsets.push_back({c});
  std::sort(subsets.begin(), subsets.end());
  subsets.erase(std::unique(subsets.begin(), subsets.end()), subsets.end());

  std::vector<std::size_t> topology;
  if (spec.ring_topology) {
    topology = *spec.ring_topology;
  } else {
    topology.resize(channels);
    std::iota(topology.begin(), topology.end(), 0);
  }

  // Group windows by class, preserving order.
  std::vector<std::vector<WindowedSample>> per_class(classes.size());
  for (const auto& s : samples) {
    const auto it = std::find(classes.begin(), classes.end(), s.class_label);
    if (it != classes.end()) per_class[static_cast<std::size_t>(it - classes.begin())].push_back(s);
  }
  for (std::size_t k = 0; k < classes.size(); ++k) check_rows(per_class[k], classes[k]);

  std::vector<FeatureMatrix> baselines(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    baselines[k] = build_feature_matrix(per_class[k], fs, fcfg, jobs);
  }

  AblationReport report;
  report.metric = spec.shift_metric;
  report.channel_count = channels;
  report.combinatorial_depth = spec.combinatorial_depth;
  report.criticality_threshold = spec.criticality_threshold;
  report.redundancy_threshold = spec.redundancy_threshold;
  report.ring_topology = topology;
  report.classes.resize(classes.size());
  for (std::size_t k = 0; k < classes.size(); ++k) {
    report.classes[k].class_label = classes[k];
    report.classes[k].subsets.resize(subsets.size());
  }

  parallel_for(classes.size() * subsets.size(), jobs, [&](std::size_t task) {
    const std::size_t k = task / subsets.size();
    const std::size_t s = task % subsets.size();
    const Matrix ablated = ablated_features(baselines[k], per_class[k], subsets[s], fs, fcfg);
    SubsetShift& out = report.classes[k].subsets[s];
    out.sensors = subsets[s];
    out.raw_shift = metric_value(evaluate_separability(baselines[k].values, ablated), spec.shift_metric);
    out.criticality = criticality_score(out.raw_shift, spec.shift_metric);
  });

  for (auto& cls : report.classes) {
    std::map<std::size_t, double> max_by_size;
    for (const auto& s : cls.subsets) {
      double& m = max_by_size[s.sensors.size()];
      m = std::max(m, s.criticality);
    }
    cls.sensor_criticality.assign(channels, 0.0);
    for (auto& s : cls.subsets) {
      const double m = max_by_size[s.sensors.size()];
      s.normalized = m > 0.0 ? s.criticality / m : 0.0;
      if (s.sensors.size() == 1) cls.sensor_criticality[s.sensors[0]] = s.normalized;
    }
    for (std::size_t c = 0; c < channels; ++c) {
      if (cls.sensor_criticality[c] < spec.redundancy_threshold) cls.redundant_sensors.push_back(c);
    }
  }

  report.ranking.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (const auto& cls : report.classes) sum += cls.sensor_criticality[c];
    report.ranking[c] = {c, sum / static_cast<double>(report.classes.size())};
  }
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [](const RankedSensor& a, const RankedSensor& b) {
                     return a.mean_criticality > b.mean_criticality;
                   });

  neighbour_compensation(report, topology, spec.criticality_threshold, spec.redundancy_threshold);
  return report;
}

void neighbour_compensation(AblationReport& report, std::span<const std::size_t> topology,
                            double criticality_threshold, double redundancy_threshold) {
  const std::size_t n = report.channel_count;
  std::vector<bool> seen(n, false);
  bool valid = topology.size() == n;
  for (std::size_t s : topology) {
    if (!valid) break;
    if (s >= n || seen[s]) valid = false;
    else seen[s] = true;
  }
  if (!valid) {
    throw AuditError(ErrorCode::kTopologyMismatch,
                     "ring topology must be a permutation of the " + std::to_string(n) + " sensor indices");
  }
  for (auto& cls : report.classes) {
    if (cls.sensor_criticality.size() != n) {
      throw AuditError(ErrorCode::kTopologyMismatch,
                       "class '" + cls.class_label + "' has criticality for " +
                           std::to_string(cls.sensor_criticality.size()) + " sensors, expected " +
                           std::to_string(n));
    }
    cls.neighbour_compensation.clear();
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t sensor = topology[pos];
      const double crit = cls.sensor_criticality[sensor];
      if (crit < criticality_threshold) continue;
      NeighbourNote note;
      note.sensor = sensor;
      note.criticality = crit;
      note.left = topology[(pos + n - 1) % n];
      note.right = topology[(pos + 1) % n];
      note.left_criticality = cls.sensor_criticality[note.left];
      note.right_criticality = cls.sensor_criticality[note.right];
      note.compensated = !(note.left_criticality < redundancy_threshold &&
                           note.right_criticality < redundancy_threshold);
      cls.neighbour_compensation.push_back(note);
    }
    std::sort(cls.neighbour_compensation.begin(), cls.neighbour_compensation.end(),
              [](const NeighbourNote& a, const NeighbourNote& b) { return a.sensor < b.sensor; });
  }
}

// ---------------------------------------------------------------------------

namespace {

std::string channel_name(std::size_t sensor) { return "ch" + std::to_string(sensor + 1); }

}  // namespace

ordered_json ablation_json(const AblationReport& report) {
  ordered_json classes = ordered_json::array();
  for (const auto& cls : report.classes) {
    ordered_json subsets = ordered_json::array();
    for (const auto& s : cls.subsets) {
      subsets.push_back({{"subset", s.sensors},
                         {"raw_shift", s.raw_shift},
                         {"criticality", s.criticality},
                         {"normalized", s.normalized}});
    }
    ordered_json notes = ordered_json::array();
    for (const auto& n : cls.neighbour_compensation) {
      notes.push_back({{"sensor", n.sensor},
                       {"criticality", n.criticality},
                       {"left_neighbour", n.left},
                       {"left_criticality", n.left_criticality},
                       {"right_neighbour", n.right},
                       {"right_criticality", n.right_criticality},
                       {"verdict", n.compensated ? "compensated" : "uncompensated"}});
    }
    classes.push_back({{"class", cls.class_label},
                       {"subsets", std::move(subsets)},
                       {"sensor_criticality", cls.sensor_criticality},
                       {"redundant_sensors", cls.redundant_sensors},
                       {"neighbour_compensation", std::move(notes)}});
  }
  ordered_json ranking = ordered_json::array();
  for (std::size_t i = 0; i < report.ranking.size(); ++i) {
    ranking.push_back({{"rank", i + 1},
                       {"sensor", report.ranking[i].sensor},
                       {"channel", channel_name(report.ranking[i].sensor)},
                       {"mean_criticality", report.ranking[i].mean_criticality}});
  }
  return ordered_json{{"shift_metric", metric_name(report.metric)},
                      {"channel_count", report.channel_count},
                      {"combinatorial_depth", report.combinatorial_depth},
                      {"criticality_threshold", report.criticality_threshold},
                      {"redundancy_threshold", report.redundancy_threshold},
                      {"ring_topology", report.ring_topology},
                      {"classes", std::move(classes)},
                      {"ranking", std::move(ranking)},
                      {"advice", advice_json(design_advice(report))}};
}

std::string ablation_csv(const AblationReport& report) {
  CsvWriter csv({"class", "subset", "shift_metric", "raw_shift", "normalized"});
  for (const auto& cls : report.classes) {
    for (const auto& s : cls.subsets) {
      csv.field(cls.class_label)
          .field(subset_label(s.sensors))
          .field(metric_name(report.metric))
          .field(s.raw_shift)
          .field(s.normalized);
      csv.end_row();
    }
  }
  return csv.str();
}

std::string ranking_csv(const AblationReport& report) {
  CsvWriter csv({"rank", "sensor", "channel", "mean_criticality"});
  for (std::size_t i = 0; i < report.ranking.size(); ++i) {
    csv.field(i + 1)
        .field(report.ranking[i].sensor)
        .field(channel_name(report.ranking[i].sensor))
        .field(report.ranking[i].mean_criticality);
    csv.end_row();
  }
  return csv.str();
}

std::string neighbour_compensation_csv(const AblationReport& report) {
  CsvWriter csv({"class", "sensor", "criticality", "left_neighbour", "left_criticality", "right_neighbour",
                 "right_criticality", "verdict"});
  for (const auto& cls : report.classes) {
    for (const auto& n : cls.neighbour_compensation) {
      csv.field(cls.class_label)
          .field(n.sensor)
          .field(n.criticality)
          .field(n.left)
          .field(n.left_criticality)
          .field(n.right)
          .field(n.right_criticality)
          .field(n.compensated ? "compensated" : "uncompensated");
      csv.end_row();
    }
  }
  return csv.str();
}

std::string criticality_plot_csv(const ClassAblation& cls) {
  CsvWriter csv({"sensor", "normalized_criticality"});
  for (std::size_t c = 0; c < cls.sensor_criticality.size(); ++c) {
    csv.field(c).field(cls.sensor_criticality[c]);
    csv.end_row();
  }
  return csv.str();
}

DesignAdvice design_advice(const AblationReport& report) {
  DesignAdvice advice;
  for (std::size_t c = 0; c < report.channel_count; ++c) {
    bool critical = false;
    bool redundant_everywhere = !report.classes.empty();
    for (const auto& cls : report.classes) {
      if (cls.sensor_criticality[c] >= report.criticality_threshold) critical = true;
      if (!(cls.sensor_criticality[c] < report.redundancy_threshold)) redundant_everywhere = false;
    }
    if (critical) advice.reinforce.push_back(c);
    if (redundant_everywhere) advice.removable.push_back(c);
  }
  for (const auto& cls : report.classes) {
    for (const auto& n : cls.neighbour_compensation) {
      if (n.compensated) continue;
      advice.degradation_notes.push_back("if sensor " + std::to_string(n.sensor) + " (" + channel_name(n.sensor) +
                                         ") fails, recognition of '" + cls.class_label +
                                         "' may be unreliable; its ring neighbours cannot compensate");
    }
  }
  return advice;
}

ordered_json advice_json(const DesignAdvice& advice) {
  return ordered_json{{"reinforce_critical_components", advice.reinforce},
                      {"implement_graceful_degradation", advice.degradation_notes},
                      {"optimise_for_efficiency", advice.removable}};
}

}  // namespace sensoraudit
