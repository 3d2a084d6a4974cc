#include "sensoraudit/separability.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "sensoraudit/error.hpp"
#include "sensoraudit/parallel.hpp"
#include "sensoraudit/report.hpp"

using nlohmann::ordered_json;

namespace sensoraudit {

const char* metric_name(ShiftMetric m) noexcept {
  switch (m) {
    case ShiftMetric::kF1: return "f1";
    case ShiftMetric::kF2: return "f2";
    case ShiftMetric::kF3: return "f3";
  }
  return "f1";
}

ShiftMetric parse_metric(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "f1") return ShiftMetric::kF1;
  if (lower == "f2") return ShiftMetric::kF2;
  if (lower == "f3") return ShiftMetric::kF3;
  throw AuditError(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(name) + "' (f1|f2|f3)");
}

double metric_value(const SeparabilityScore& s, ShiftMetric m) noexcept {
  switch (m) {
    case ShiftMetric::kF1: return s.f1;
    case ShiftMetric::kF2: return s.f2;
    case ShiftMetric::kF3: return s.f3;
  }
  return s.f1;
}

namespace {

struct ColumnStats {
  double mean = 0.0;
  double variance = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

std::vector<ColumnStats> column_stats(const Matrix& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  std::vector<ColumnStats> stats(cols);
  for (std::size_t k = 0; k < cols; ++k) {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      const double v = m(r, k);
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    ColumnStats& s = stats[k];
    s.min = lo;
    s.max = hi;
    if (lo == hi) {
      // Exact for constant columns; summation would perturb the mean.
      s.mean = lo;
      s.variance = 0.0;
      continue;
    }
    s.mean = sum / static_cast<double>(rows);
    double ss = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const double d = m(r, k) - s.mean;
      ss += d * d;
    }
    s.variance = ss / static_cast<double>(rows);
  }
  return stats;
}

void check_shapes(const Matrix& target, const Matrix& reference, std::size_t min_rows) {
  if (target.rows() < min_rows || reference.rows() < min_rows) {
    throw AuditError(ErrorCode::kTooFewRows,
                     "separability needs at least " + std::to_string(min_rows) +
                         " rows per distribution, got " + std::to_string(target.rows()) + " and " +
                         std::to_string(reference.rows()));
  }
  if (target.cols() != reference.cols()) {
    throw AuditError(ErrorCode::kMismatchedColumns,
                     "distributions have " + std::to_string(target.cols()) + " and " +
                         std::to_string(reference.cols()) + " columns");
  }
}

void check_layout(const FeatureMatrix& target, const FeatureMatrix& reference) {
  const auto& a = target.column_index;
  const auto& b = reference.column_index;
  const bool same = a.size() == b.size() &&
                    std::equal(a.begin(), a.end(), b.begin(), [](const ColumnInfo& x, const ColumnInfo& y) {
                      return x.channel == y.channel && x.feature == y.feature;
                    });
  if (!same) throw AuditError(ErrorCode::kMismatchedColumns, "feature matrices use different column layouts");
}

FisherResult fisher_from_stats(const std::vector<ColumnStats>& t, const std::vector<ColumnStats>& r) {
  FisherResult out;
  out.per_dimension.resize(t.size(), 0.0);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double diff = t[k].mean - r[k].mean;
    const double var_sum = t[k].variance + r[k].variance;
    if (var_sum > 0.0) {
      const double score = diff * diff / var_sum;
      out.per_dimension[k] = score;
      if (out.argmax == kNoColumn || score > out.f1) {
        out.f1 = score;
        out.argmax = static_cast<std::ptrdiff_t>(k);
      }
      continue;
    }
    out.degenerate_dims.push_back(k);
    if (diff != 0.0) {
      out.per_dimension[k] = kFisherCap;
      out.capped_dims.push_back(k);
    }
  }
  // Degenerate dimensions stay out of the max. Only when nothing else
  // qualifies does a capped dimension report perfect separation.
  if (out.argmax == kNoColumn && !out.capped_dims.empty()) {
    out.f1 = kFisherCap;
    out.argmax = static_cast<std::ptrdiff_t>(out.capped_dims.front());
  }
  return out;
}

OverlapResult overlap_from_stats(const std::vector<ColumnStats>& t, const std::vector<ColumnStats>& r) {
  OverlapResult out;
  out.per_dimension.resize(t.size());
  double product = 1.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double overlap = std::max(0.0, std::min(t[k].max, r[k].max) - std::max(t[k].min, r[k].min));
    const double range = std::max(t[k].max, r[k].max) - std::min(t[k].min, r[k].min);
    out.per_dimension[k].overlap = overlap;
    out.per_dimension[k].range = range;
    if (range > 0.0) {
      product *= overlap / range;
    } else {
      out.degenerate_dims.push_back(k);
    }
  }
  out.f2 = product;
  return out;
}

EfficiencyResult efficiency_from_dims(const std::vector<DimensionScore>& dims) {
  EfficiencyResult out;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (!(dims[k].range > 0.0)) continue;
    const double eff = 1.0 - dims[k].overlap / dims[k].range;
    if (out.argmax == kNoColumn || eff > out.f3) {
      out.f3 = eff;
      out.argmax = static_cast<std::ptrdiff_t>(k);
    }
  }
  return out;
}

}  // namespace

FisherResult f1_max_fisher(const Matrix& target, const Matrix& reference) {
  check_shapes(target, reference, 2);
  return fisher_from_stats(column_stats(target), column_stats(reference));
}

OverlapResult f2_overlap_volume(const Matrix& target, const Matrix& reference) {
  check_shapes(target, reference, 1);
  return overlap_from_stats(column_stats(target), column_stats(reference));
}

EfficiencyResult f3_feature_efficiency(const Matrix& target, const Matrix& reference) {
  return efficiency_from_dims(f2_overlap_volume(target, reference).per_dimension);
}

FisherResult f1_max_fisher(const FeatureMatrix& target, const FeatureMatrix& reference) {
  check_layout(target, reference);
  return f1_max_fisher(target.values, reference.values);
}

OverlapResult f2_overlap_volume(const FeatureMatrix& target, const FeatureMatrix& reference) {
  check_layout(target, reference);
  return f2_overlap_volume(target.values, reference.values);
}

EfficiencyResult f3_feature_efficiency(const FeatureMatrix& target, const FeatureMatrix& reference) {
  check_layout(target, reference);
  return f3_feature_efficiency(target.values, reference.values);
}

SeparabilityScore evaluate_separability(const Matrix& target, const Matrix& reference) {
  check_shapes(target, reference, 2);
  const auto ts = column_stats(target);
  const auto rs = column_stats(reference);
  FisherResult fisher = fisher_from_stats(ts, rs);
  OverlapResult overlap = overlap_from_stats(ts, rs);
  const EfficiencyResult eff = efficiency_from_dims(overlap.per_dimension);

  SeparabilityScore s;
  s.f1 = fisher.f1;
  s.f1_argmax = fisher.argmax;
  s.f2 = overlap.f2;
  s.f3 = eff.f3;
  s.f3_argmax = eff.argmax;
  s.per_dimension = std::move(overlap.per_dimension);
  for (std::size_t k = 0; k < s.per_dimension.size(); ++k) s.per_dimension[k].f1 = fisher.per_dimension[k];
  std::vector<std::size_t> degenerate = fisher.degenerate_dims;
  degenerate.insert(degenerate.end(), overlap.degenerate_dims.begin(), overlap.degenerate_dims.end());
  std::sort(degenerate.begin(), degenerate.end());
  degenerate.erase(std::unique(degenerate.begin(), degenerate.end()), degenerate.end());
  s.degenerate_dims = std::move(degenerate);
  s.capped_dims = std::move(fisher.capped_dims);
  return s;
}

PairwiseAudit pairwise_audit(const std::map<std::string, FeatureMatrix>& matrices,
                             const std::vector<std::string>& class_order, AuditMode mode,
                             unsigned jobs) {
  std::vector<const FeatureMatrix*> ordered;
  for (const auto& label : class_order) {
    const auto it = matrices.find(label);
    if (it == matrices.end() || it->second.rows() == 0) {
      throw AuditError(ErrorCode::kTooFewRows, "class '" + label + "' has no samples");
    }
    ordered.push_back(&it->second);
  }
  if (ordered.size() < 2) {
    throw AuditError(ErrorCode::kTooFewClasses,
                     "pairwise audit needs at least 2 classes, got " + std::to_string(ordered.size()));
  }
  for (std::size_t i = 1; i < ordered.size(); ++i) check_layout(*ordered[0], *ordered[i]);

  PairwiseAudit audit;
  audit.mode = mode;
  std::vector<std::pair<std::size_t, std::size_t>> jobs_list;
  if (mode == AuditMode::kOneVsOne) {
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      for (std::size_t j = i + 1; j < ordered.size(); ++j) jobs_list.emplace_back(i, j);
    }
  } else {
    for (std::size_t i = 0; i < ordered.size(); ++i) jobs_list.emplace_back(i, i);
  }
  audit.pairs.resize(jobs_list.size());

  auto check_rows = [&](const Matrix& m, const std::string& label) {
    if (m.rows() < 2) {
      throw AuditError(ErrorCode::kTooFewRows,
                       "class '" + label + "' has " + std::to_string(m.rows()) + " rows, need at least 2");
    }
  };

  parallel_for(jobs_list.size(), jobs, [&](std::size_t p) {
    const auto [i, j] = jobs_list[p];
    PairResult& result = audit.pairs[p];
    result.target = class_order[i];
    check_rows(ordered[i]->values, class_order[i]);
    if (mode == AuditMode::kOneVsOne) {
      result.reference = class_order[j];
      check_rows(ordered[j]->values, class_order[j]);
      result.score = evaluate_separability(ordered[i]->values, ordered[j]->values);
    } else {
      result.reference = "rest";
      Matrix rest;
      for (std::size_t k = 0; k < ordered.size(); ++k) {
        if (k == i) continue;
        for (std::size_t r = 0; r < ordered[k]->rows(); ++r) rest.append_row(ordered[k]->values.row(r));
      }
      check_rows(rest, "rest");
      result.score = evaluate_separability(ordered[i]->values, rest);
    }
    result.raw_fdr = result.score.f1;
  });

  double max_fdr = 0.0;
  for (const auto& p : audit.pairs) max_fdr = std::max(max_fdr, p.raw_fdr);
  for (auto& p : audit.pairs) p.normalized_fdr = max_fdr > 0.0 ? p.raw_fdr / max_fdr : 0.0;
  return audit;
}

namespace {

std::string column_label(std::ptrdiff_t col, std::span<const ColumnInfo> columns) {
  if (col == kNoColumn) return "";
  const auto idx = static_cast<std::size_t>(col);
  return idx < columns.size() ? columns[idx].name() : std::to_string(idx);
}

}  // namespace

std::string complexity_csv(const PairwiseAudit& audit, std::span<const ColumnInfo> columns) {
  CsvWriter csv({"target", "reference", "f1", "f1_argmax_column", "f2", "f3", "f3_argmax_column",
                 "normalized_fdr"});
  for (const auto& p : audit.pairs) {
    csv.field(p.target)
        .field(p.reference)
        .field(p.score.f1)
        .field(column_label(p.score.f1_argmax, columns))
        .field(p.score.f2)
        .field(p.score.f3)
        .field(column_label(p.score.f3_argmax, columns))
        .field(p.normalized_fdr);
    csv.end_row();
  }
  return csv.str();
}

ordered_json complexity_json(const PairwiseAudit& audit, std::span<const ColumnInfo> columns) {
  ordered_json pairs = ordered_json::array();
  for (const auto& p : audit.pairs) {
    ordered_json f1_dims = ordered_json::array();
    ordered_json overlaps = ordered_json::array();
    ordered_json ranges = ordered_json::array();
    for (const auto& d : p.score.per_dimension) {
      f1_dims.push_back(d.f1);
      overlaps.push_back(d.overlap);
      ranges.push_back(d.range);
    }
    pairs.push_back({{"target", p.target},
                     {"reference", p.reference},
                     {"f1", p.score.f1},
                     {"f1_argmax", p.score.f1_argmax},
                     {"f1_argmax_column", column_label(p.score.f1_argmax, columns)},
                     {"f2", p.score.f2},
                     {"f3", p.score.f3},
                     {"f3_argmax", p.score.f3_argmax},
                     {"f3_argmax_column", column_label(p.score.f3_argmax, columns)},
                     {"raw_fdr", p.raw_fdr},
                     {"normalized_fdr", p.normalized_fdr},
                     {"per_dimension", {{"f1", std::move(f1_dims)},
                                        {"overlap", std::move(overlaps)},
                                        {"range", std::move(ranges)}}},
                     {"degenerate_dims", p.score.degenerate_dims},
                     {"capped_dims", p.score.capped_dims}});
  }
  return ordered_json{{"mode", audit.mode == AuditMode::kOneVsOne ? "one_vs_one" : "one_vs_rest"},
                      {"pairs", std::move(pairs)}};
}

std::string complexity_plot_csv(const PairwiseAudit& audit) {
  CsvWriter csv({"pair", "normalized_fdr"});
  for (const auto& p : audit.pairs) {
    csv.field(p.target + " vs " + p.reference).field(p.normalized_fdr);
    csv.end_row();
  }
  return csv.str();
}

}  // namespace sensoraudit
