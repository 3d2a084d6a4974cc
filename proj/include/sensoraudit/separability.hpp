#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sensoraudit/features.hpp"
#include "sensoraudit/matrix.hpp"

namespace sensoraudit {

// Score given to a dimension whose two distributions are both constant but
// at different values.
inline constexpr double kFisherCap = 1e12;

// No admissible dimension.
inline constexpr std::ptrdiff_t kNoColumn = -1;

struct DimensionScore {
  double f1 = 0.0;
  double overlap = 0.0;
  double range = 0.0;
};

struct SeparabilityScore {
  double f1 = 0.0;
  std::ptrdiff_t f1_argmax = kNoColumn;
  double f2 = 1.0;
  double f3 = 0.0;
  std::ptrdiff_t f3_argmax = kNoColumn;
  std::vector<DimensionScore> per_dimension;
  // Columns with range 0 or zero variance sum.
  std::vector<std::size_t> degenerate_dims;
  // Columns whose per-dimension F1 is kFisherCap. They enter the F1 max only
  // when no column has a positive variance sum.
  std::vector<std::size_t> capped_dims;
};

enum class ShiftMetric { kF1, kF2, kF3 };

const char* metric_name(ShiftMetric m) noexcept;
ShiftMetric parse_metric(std::string_view name);  // "f1" | "f2" | "f3", any case

double metric_value(const SeparabilityScore& s, ShiftMetric m) noexcept;

// All three measures between two row sets sharing a column layout. F1 uses
// population variances. Requires >= 2 rows in each matrix.
SeparabilityScore evaluate_separability(const Matrix& target, const Matrix& reference);

struct FisherResult {
  double f1 = 0.0;
  std::ptrdiff_t argmax = kNoColumn;
  std::vector<double> per_dimension;
  std::vector<std::size_t> degenerate_dims;
  std::vector<std::size_t> capped_dims;
};

struct OverlapResult {
  double f2 = 1.0;
  std::vector<DimensionScore> per_dimension;  // overlap/range filled, f1 zero
  std::vector<std::size_t> degenerate_dims;
};

struct EfficiencyResult {
  double f3 = 0.0;
  std::ptrdiff_t argmax = kNoColumn;
};

FisherResult f1_max_fisher(const FeatureMatrix& target, const FeatureMatrix& reference);
OverlapResult f2_overlap_volume(const FeatureMatrix& target, const FeatureMatrix& reference);
EfficiencyResult f3_feature_efficiency(const FeatureMatrix& target, const FeatureMatrix& reference);

// Matrix-level overloads for callers without column metadata.
FisherResult f1_max_fisher(const Matrix& target, const Matrix& reference);
OverlapResult f2_overlap_volume(const Matrix& target, const Matrix& reference);
EfficiencyResult f3_feature_efficiency(const Matrix& target, const Matrix& reference);

enum class AuditMode { kOneVsOne, kOneVsRest };

struct PairResult {
  std::string target;
  std::string reference;  // "rest" in one-vs-rest mode
  SeparabilityScore score;
  double raw_fdr = 0.0;
  double normalized_fdr = 0.0;
};

struct PairwiseAudit {
  AuditMode mode = AuditMode::kOneVsOne;
  std::vector<PairResult> pairs;
};

// `class_order` fixes pair order: (order[i], order[j]) for i < j, or each
// class against the pooled rows of all others. normalized_fdr divides by the
// largest raw FDR among the audited pairs (all zero if that maximum is 0).
PairwiseAudit pairwise_audit(const std::map<std::string, FeatureMatrix>& matrices,
                             const std::vector<std::string>& class_order, AuditMode mode,
                             unsigned jobs = 1);

std::string complexity_csv(const PairwiseAudit& audit, std::span<const ColumnInfo> columns);
nlohmann::ordered_json complexity_json(const PairwiseAudit& audit, std::span<const ColumnInfo> columns);
// Plot table: pair label, normalized FDR.
std::string complexity_plot_csv(const PairwiseAudit& audit);

}  // namespace sensoraudit
