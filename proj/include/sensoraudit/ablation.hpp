#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensoraudit/features.hpp"
#include "sensoraudit/ingest.hpp"
#include "sensoraudit/separability.hpp"

namespace sensoraudit {

using SensorSet = std::vector<std::size_t>;  // sorted, unique, 0-based

struct AblationSpec {
  std::vector<SensorSet> sensor_subsets;  // empty: every subset up to combinatorial_depth
  std::size_t combinatorial_depth = 1;
  ShiftMetric shift_metric = ShiftMetric::kF1;
  std::vector<std::string> classes;       // empty: every audited class
  std::optional<std::vector<std::size_t>> ring_topology;  // default: index order
  double criticality_threshold = 0.8;
  double redundancy_threshold = 0.3;
};

void to_json(nlohmann::ordered_json& j, const AblationSpec& spec);
void from_json(const nlohmann::ordered_json& j, AblationSpec& spec);

// All subsets of size 1..depth over `sensors` channels, by size then
// lexicographically.
std::vector<SensorSet> enumerate_subsets(std::size_t sensors, std::size_t depth);

std::string subset_label(const SensorSet& s);  // "2" or "1+3" (0-based)

WindowedSample nullify(const WindowedSample& sample, const SensorSet& sensors);

// Distributional shift between intact and nullified versions of one class,
// under the chosen metric over the full feature space.
double ablated_shift(std::span<const WindowedSample> class_samples, const SensorSet& sensors,
                     double fs, const FeatureConfig& fcfg, ShiftMetric metric);

// Larger means more critical: F1 and F3 as-is, 1 - F2 for the overlap volume.
double criticality_score(double raw_shift, ShiftMetric metric) noexcept;

struct SubsetShift {
  SensorSet sensors;
  double raw_shift = 0.0;
  double criticality = 0.0;
  double normalized = 0.0;  // criticality / class max over subsets of the same size
};

struct NeighbourNote {
  std::size_t sensor = 0;
  double criticality = 0.0;
  std::size_t left = 0;
  double left_criticality = 0.0;
  std::size_t right = 0;
  double right_criticality = 0.0;
  bool compensated = false;
};

struct ClassAblation {
  std::string class_label;
  std::vector<SubsetShift> subsets;
  std::vector<double> sensor_criticality;  // normalized singleton scores, per sensor
  std::vector<std::size_t> redundant_sensors;
  std::vector<NeighbourNote> neighbour_compensation;
};

struct RankedSensor {
  std::size_t sensor = 0;
  double mean_criticality = 0.0;
};

struct AblationReport {
  ShiftMetric metric = ShiftMetric::kF1;
  std::size_t channel_count = 0;
  std::size_t combinatorial_depth = 1;
  double criticality_threshold = 0.8;
  double redundancy_threshold = 0.3;
  std::vector<std::size_t> ring_topology;
  std::vector<ClassAblation> classes;
  std::vector<RankedSensor> ranking;  // descending mean criticality, ties by index
};

// `class_order` gives the audited classes when spec.classes is empty.
AblationReport run_ablation_audit(std::span<const WindowedSample> samples, const AblationSpec& spec,
                                  const FeatureConfig& fcfg, double fs,
                                  const std::vector<std::string>& class_order, unsigned jobs = 1);

// Fills neighbour_compensation for every class from its sensor_criticality.
void neighbour_compensation(AblationReport& report, std::span<const std::size_t> topology,
                            double criticality_threshold, double redundancy_threshold);

nlohmann::ordered_json ablation_json(const AblationReport& report);
std::string ablation_csv(const AblationReport& report);
std::string ranking_csv(const AblationReport& report);
std::string neighbour_compensation_csv(const AblationReport& report);
// Sensor vs normalized criticality for one class.
std::string criticality_plot_csv(const ClassAblation& cls);

struct DesignAdvice {
  std::vector<std::size_t> reinforce;         // critical for at least one class
  std::vector<std::string> degradation_notes;  // uncompensated critical sensors
  std::vector<std::size_t> removable;         // redundant for every class
};

DesignAdvice design_advice(const AblationReport& report);
nlohmann::ordered_json advice_json(const DesignAdvice& advice);

}  // namespace sensoraudit
