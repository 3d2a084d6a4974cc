#include "sensoraudit/audit.hpp"

#include <algorithm>
#include <cctype>

#include "sensoraudit/error.hpp"
#include "sensoraudit/report.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace sensoraudit {

const char* command_name(Command c) noexcept {
  switch (c) {
    case Command::kComplexity: return "complexity";
    case Command::kAblate: return "ablate";
    case Command::kOracle: return "oracle";
    case Command::kFull: return "full";
    case Command::kSynth: return "synth";
    case Command::kIngestCheck: return "ingest-check";
  }
  return "full";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::kComplexity, Command::kAblate, Command::kOracle, Command::kFull, Command::kSynth,
                    Command::kIngestCheck}) {
    if (name == command_name(c)) return c;
  }
  throw AuditError(ErrorCode::kInvalidArgument, "unknown command '" + std::string(name) + "'");
}

namespace {

const char* mode_name(ComplexityMode m) {
  switch (m) {
    case ComplexityMode::kOneVsOne: return "one_vs_one";
    case ComplexityMode::kOneVsRest: return "one_vs_rest";
    case ComplexityMode::kBoth: return "both";
  }
  return "one_vs_one";
}

ComplexityMode parse_mode(const std::string& s) {
  for (auto m : {ComplexityMode::kOneVsOne, ComplexityMode::kOneVsRest, ComplexityMode::kBoth}) {
    if (s == mode_name(m)) return m;
  }
  throw AuditError(ErrorCode::kInvalidArgument, "unknown complexity_mode '" + s + "'");
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ordered_json load_json_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw AuditError(ErrorCode::kMissingFile, "file not found: " + path.string());
  try {
    return ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw AuditError(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
}

// A config section given inline or as a path to a JSON file.
ordered_json section(const ordered_json& value, const fs::path& base) {
  if (value.is_string()) return load_json_file(resolve(base, value.get<std::string>()));
  if (!value.is_object()) throw AuditError(ErrorCode::kInvalidArgument, "config section must be an object or a path");
  return value;
}

void apply_config(AuditRunConfig& cfg, const ordered_json& j, const fs::path& base) {
  if (!j.is_object()) throw AuditError(ErrorCode::kInvalidArgument, "run configuration must be a JSON object");
  const bool has_data = j.contains("data") && !j.at("data").is_null();
  const bool has_synth = j.contains("synthetic") && !j.at("synthetic").is_null();
  if (has_data && has_synth) {
    throw AuditError(ErrorCode::kInvalidArgument, "give either a dataset or a synthetic spec, not both");
  }
  try {
    if (has_data) {
      cfg.dataset_root = resolve(base, j.at("data").get<std::string>());
      cfg.synthetic_spec_path.reset();
      cfg.synthetic_spec.reset();
    }
    if (has_synth) {
      const auto& s = j.at("synthetic");
      if (s.is_object()) {
        cfg.synthetic_spec_path.reset();
        cfg.synthetic_spec = s.get<SyntheticSpec>();
      } else {
        cfg.synthetic_spec_path = resolve(base, s.get<std::string>());
        cfg.synthetic_spec = load_json_file(*cfg.synthetic_spec_path).get<SyntheticSpec>();
      }
      cfg.dataset_root.reset();
    }
    if (j.contains("segmentation")) cfg.segmentation = section(j.at("segmentation"), base).get<SegmentationConfig>();
    if (j.contains("features")) cfg.features = section(j.at("features"), base).get<FeatureConfig>();
    if (j.contains("ablation")) cfg.ablation = section(j.at("ablation"), base).get<AblationSpec>();
    if (j.contains("oracle")) cfg.oracle = section(j.at("oracle"), base).get<OracleConfig>();
    if (j.contains("metric")) cfg.ablation.shift_metric = parse_metric(j.at("metric").get<std::string>());
    if (j.contains("depth")) cfg.ablation.combinatorial_depth = j.at("depth").get<std::size_t>();
    if (j.contains("seed") && !j.at("seed").is_null()) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("include_rest")) cfg.include_rest = j.at("include_rest").get<bool>();
    if (j.contains("complexity_mode")) cfg.complexity_mode = parse_mode(j.at("complexity_mode").get<std::string>());
    if (j.contains("output_dir")) cfg.output_dir = resolve(base, j.at("output_dir").get<std::string>());
    if (j.contains("overwrite")) cfg.overwrite = j.at("overwrite").get<bool>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<unsigned>();
  } catch (const nlohmann::json::exception& e) {
    throw AuditError(ErrorCode::kInvalidArgument, std::string("run configuration: ") + e.what());
  }
}

}  // namespace

void AuditRunConfig::validate() const {
  if (dataset_root.has_value() == synthetic_spec.has_value()) {
    throw AuditError(ErrorCode::kInvalidArgument, "exactly one of a dataset root or a synthetic spec is required");
  }
  if (jobs == 0) throw AuditError(ErrorCode::kInvalidArgument, "jobs must be >= 1");
  segmentation.validate();
  features.validate();
  oracle.validate();
  if (ablation.combinatorial_depth == 0 && ablation.sensor_subsets.empty()) {
    throw AuditError(ErrorCode::kEmptySpec, "ablation depth must be >= 1");
  }
}

std::uint64_t AuditRunConfig::resolved_seed() const {
  if (seed) return *seed;
  if (synthetic_spec) return synthetic_spec->seed;
  return 0;
}

AuditRunConfig parse_run_config(const ordered_json& j) {
  AuditRunConfig cfg;
  if (j.contains("config_file") && !j.at("config_file").is_null()) {
    const fs::path file = j.at("config_file").get<std::string>();
    apply_config(cfg, load_json_file(file), file.parent_path());
  }
  ordered_json overrides = j;
  overrides.erase("config_file");
  apply_config(cfg, overrides, {});
  return cfg;
}

ordered_json config_echo(const AuditRunConfig& cfg) {
  ordered_json source;
  if (cfg.dataset_root) {
    source = {{"kind", "dataset"}, {"path", cfg.dataset_root->generic_string()}};
  } else if (cfg.synthetic_spec) {
    SyntheticSpec spec = *cfg.synthetic_spec;
    spec.seed = cfg.resolved_seed();
    source = {{"kind", "synthetic"},
              {"path", cfg.synthetic_spec_path ? ordered_json(cfg.synthetic_spec_path->generic_string())
                                               : ordered_json(nullptr)},
              {"spec", spec}};
  }
  OracleConfig oracle = cfg.oracle;
  oracle.seed = cfg.resolved_seed();
  return ordered_json{{"data_source", std::move(source)},
                      {"seed", cfg.resolved_seed()},
                      {"include_rest", cfg.include_rest},
                      {"complexity_mode", mode_name(cfg.complexity_mode)},
                      {"segmentation", cfg.segmentation},
                      {"features", cfg.features},
                      {"ablation", cfg.ablation},
                      {"oracle", oracle}};
}

namespace {

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const AuditError& e) {
    throw AuditError(e.code(), std::string(stage) + ": " + e.what());
  }
}

bool is_rest_class(const std::string& name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return lower == "rest";
}

struct Prepared {
  RecordingSet set;
  std::vector<std::string> classes;  // audited, in manifest order
  std::vector<WindowedSample> windows;
  std::map<std::string, std::size_t> windows_per_class;
};

RecordingSet load_source(const AuditRunConfig& cfg) {
  return in_stage("ingest", [&] {
    if (cfg.dataset_root) return load_dataset(*cfg.dataset_root);
    return generate_synthetic(*cfg.synthetic_spec, cfg.resolved_seed());
  });
}

Prepared prepare(const AuditRunConfig& cfg) {
  Prepared p;
  p.set = load_source(cfg);
  for (const auto& c : p.set.class_names) {
    if (cfg.include_rest || !is_rest_class(c)) p.classes.push_back(c);
  }
  in_stage("segmentation", [&] {
    auto all = segment(p.set, cfg.segmentation);
    for (auto& w : all) {
      if (std::find(p.classes.begin(), p.classes.end(), w.class_label) == p.classes.end()) continue;
      p.windows_per_class[w.class_label]++;
      p.windows.push_back(std::move(w));
    }
    return 0;
  });
  return p;
}

void require_windows(const Prepared& p, std::size_t minimum) {
  for (const auto& c : p.classes) {
    const auto it = p.windows_per_class.find(c);
    const std::size_t n = it == p.windows_per_class.end() ? 0 : it->second;
    if (n < minimum) {
      throw AuditError(ErrorCode::kTooFewRows, "segmentation: class '" + c + "' has " + std::to_string(n) +
                                                   " windows after windowing, need at least " +
                                                   std::to_string(minimum));
    }
  }
}

using Artifacts = std::vector<std::pair<std::string, std::string>>;

void write_artifacts(const AuditRunConfig& cfg, const Artifacts& files) {
  in_stage("output", [&] {
    for (const auto& [name, body] : files) {
      if (!cfg.overwrite && fs::exists(cfg.output_dir / name)) {
        throw AuditError(ErrorCode::kOutputExists,
                         (cfg.output_dir / name).string() + " already exists (use --overwrite to replace)");
      }
    }
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw AuditError(ErrorCode::kIoError, "cannot create " + cfg.output_dir.string() + ": " + ec.message());
    for (const auto& [name, body] : files) write_file(cfg.output_dir / name, body);
    return 0;
  });
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<PairwiseAudit> complexity_audits(const AuditRunConfig& cfg,
                                             const std::map<std::string, FeatureMatrix>& matrices,
                                             const std::vector<std::string>& classes) {
  return in_stage("complexity", [&] {
    std::vector<PairwiseAudit> audits;
    if (cfg.complexity_mode != ComplexityMode::kOneVsRest) {
      audits.push_back(pairwise_audit(matrices, classes, AuditMode::kOneVsOne, cfg.jobs));
    }
    if (cfg.complexity_mode != ComplexityMode::kOneVsOne) {
      audits.push_back(pairwise_audit(matrices, classes, AuditMode::kOneVsRest, cfg.jobs));
    }
    return audits;
  });
}

std::string joined_complexity_csv(const std::vector<PairwiseAudit>& audits, std::span<const ColumnInfo> columns) {
  std::string out;
  for (std::size_t i = 0; i < audits.size(); ++i) {
    std::string part = complexity_csv(audits[i], columns);
    if (i > 0) part.erase(0, part.find('\n') + 1);  // one header
    out += part;
  }
  return out;
}

ordered_json joined_complexity_json(const std::vector<PairwiseAudit>& audits, std::span<const ColumnInfo> columns) {
  ordered_json arr = ordered_json::array();
  for (const auto& a : audits) arr.push_back(complexity_json(a, columns));
  return arr;
}

const PairwiseAudit* one_vs_one(const std::vector<PairwiseAudit>& audits) {
  for (const auto& a : audits) {
    if (a.mode == AuditMode::kOneVsOne) return &a;
  }
  return nullptr;
}

struct ValidationRow {
  std::string class_a;
  std::string class_b;
  double raw_fdr = 0.0;
  double normalized_fdr = 0.0;
  double mcc = 0.0;
  double accuracy = 0.0;
};

std::vector<ValidationRow> join_validation(const PairwiseAudit& fdr, const std::vector<OracleResult>& oracle) {
  std::vector<ValidationRow> rows;
  for (const auto& p : fdr.pairs) {
    for (const auto& r : oracle) {
      const bool match = (r.class_a == p.target && r.class_b == p.reference) ||
                         (r.class_a == p.reference && r.class_b == p.target);
      if (!match) continue;
      rows.push_back({p.target, p.reference, p.raw_fdr, p.normalized_fdr, r.mcc, r.accuracy});
    }
  }
  return rows;
}

std::string validation_csv(const std::vector<ValidationRow>& rows) {
  CsvWriter csv({"class_a", "class_b", "raw_fdr", "normalized_fdr", "mcc", "accuracy"});
  for (const auto& r : rows) {
    csv.field(r.class_a).field(r.class_b).field(r.raw_fdr).field(r.normalized_fdr).field(r.mcc).field(r.accuracy);
    csv.end_row();
  }
  return csv.str();
}

ordered_json validation_json(const std::vector<ValidationRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{"class_a", r.class_a},
                   {"class_b", r.class_b},
                   {"raw_fdr", r.raw_fdr},
                   {"normalized_fdr", r.normalized_fdr},
                   {"mcc", r.mcc},
                   {"accuracy", r.accuracy}});
  }
  return arr;
}

ordered_json oracle_json(const std::vector<OracleResult>& results) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : results) {
    arr.push_back({{"class_a", r.class_a},
                   {"class_b", r.class_b},
                   {"mcc", r.mcc},
                   {"accuracy", r.accuracy},
                   {"tp", r.confusion.tp},
                   {"tn", r.confusion.tn},
                   {"fp", r.confusion.fp},
                   {"fn", r.confusion.fn},
                   {"seed", r.seed}});
  }
  return arr;
}

std::string sensor_list(const std::vector<std::size_t>& sensors) {
  if (sensors.empty()) return "none";
  std::string out;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(sensors[i]) + " (ch" + std::to_string(sensors[i] + 1) + ")";
  }
  return out;
}

std::string advice_markdown(const AblationReport& report) {
  const DesignAdvice advice = design_advice(report);
  std::string md = "# Sensor fault-tolerance advice\n\n";
  md += "Shift metric: " + std::string(metric_name(report.metric)) +
        "; criticality threshold " + format_double(report.criticality_threshold) +
        "; redundancy threshold " + format_double(report.redundancy_threshold) + ".\n\n";
  md += "## Reinforce Critical Components\n\n";
  md += "Sensors critical for at least one class: " + sensor_list(advice.reinforce) + ".\n";
  for (const auto& cls : report.classes) {
    std::vector<std::size_t> critical;
    for (std::size_t c = 0; c < cls.sensor_criticality.size(); ++c) {
      if (cls.sensor_criticality[c] >= report.criticality_threshold) critical.push_back(c);
    }
    md += "- " + cls.class_label + ": " + sensor_list(critical) + "\n";
  }
  md += "\n## Implement Graceful Degradation\n\n";
  if (advice.degradation_notes.empty()) md += "No critical sensor lacks a compensating ring neighbour.\n";
  for (const auto& note : advice.degradation_notes) md += "- " + note + "\n";
  md += "\n## Optimise for Efficiency\n\n";
  md += "Sensors below the redundancy threshold for every class: " + sensor_list(advice.removable) + ".\n";
  return md;
}

}  // namespace

RunOutcome run_command(Command command, const AuditRunConfig& cfg) {
  cfg.validate();
  const ordered_json echo = config_echo(cfg);
  RunOutcome outcome;
  outcome.summary = ordered_json{{"schema_version", kSchemaVersion},
                                 {"tool_version", kToolVersion},
                                 {"command", command_name(command)},
                                 {"config", echo}};
  Artifacts files;

  if (command == Command::kSynth) {
    if (!cfg.synthetic_spec) throw AuditError(ErrorCode::kInvalidArgument, "synth requires a synthetic spec");
    const RecordingSet set = load_source(cfg);
    in_stage("output", [&] {
      write_dataset(set, cfg.output_dir, cfg.overwrite);
      return 0;
    });
    outcome.summary["dataset"] = {{"recordings", set.recordings.size()},
                                  {"channel_count", set.channel_count},
                                  {"sampling_rate_hz", set.sampling_rate_hz},
                                  {"class_names", set.class_names}};
    outcome.artifacts.push_back("dataset.json");
    outcome.summary["artifacts"] = outcome.artifacts;
    return outcome;
  }

  const Prepared prep = prepare(cfg);

  if (command == Command::kIngestCheck) {
    std::map<std::string, std::size_t> recordings;
    for (const auto& r : prep.set.recordings) recordings[r.class_label]++;
    ordered_json per_class = ordered_json::array();
    for (const auto& c : prep.set.class_names) {
      const auto w = prep.windows_per_class.find(c);
      per_class.push_back({{"class", c},
                           {"audited", std::find(prep.classes.begin(), prep.classes.end(), c) != prep.classes.end()},
                           {"recordings", recordings[c]},
                           {"windows", w == prep.windows_per_class.end() ? 0 : w->second}});
    }
    outcome.summary["dataset"] = {{"recordings", prep.set.recordings.size()},
                                  {"channel_count", prep.set.channel_count},
                                  {"sampling_rate_hz", prep.set.sampling_rate_hz},
                                  {"classes", std::move(per_class)}};
    return outcome;
  }

  const bool do_complexity = command == Command::kComplexity || command == Command::kFull;
  const bool do_ablation = command == Command::kAblate || command == Command::kFull;
  const bool do_oracle = command == Command::kOracle || command == Command::kFull;
  ordered_json results = ordered_json::object();

  if (prep.classes.size() < 2 && (do_complexity || do_oracle)) {
    throw AuditError(ErrorCode::kTooFewClasses,
                     "ingest: audits need at least 2 classes, found " + std::to_string(prep.classes.size()));
  }
  require_windows(prep, 2);

  std::map<std::string, FeatureMatrix> matrices;
  std::vector<ColumnInfo> columns = column_layout(prep.set.channel_count, cfg.features);
  if (do_complexity || do_oracle) {
    matrices = in_stage("features", [&] {
      return build_class_matrices(prep.windows, prep.set.sampling_rate_hz, cfg.features, cfg.jobs);
    });
  }

  std::vector<PairwiseAudit> audits;
  if (do_complexity || do_oracle) audits = complexity_audits(cfg, matrices, prep.classes);

  if (do_complexity) {
    ordered_json cj = {{"schema_version", kSchemaVersion},
                       {"config", echo},
                       {"columns", columns_json(columns)},
                       {"audits", joined_complexity_json(audits, columns)}};
    files.emplace_back("features.csv", feature_matrices_csv(matrices, prep.classes));
    files.emplace_back("columns.json", dump(columns_json(columns)));
    files.emplace_back("complexity.csv", joined_complexity_csv(audits, columns));
    files.emplace_back("complexity.json", dump(cj));
    const PairwiseAudit* ovo = one_vs_one(audits);
    files.emplace_back("complexity_plotdata.csv", complexity_plot_csv(ovo ? *ovo : audits.front()));
    results["complexity"] = joined_complexity_json(audits, columns);
  }

  if (do_ablation) {
    const AblationReport report = in_stage("ablation", [&] {
      return run_ablation_audit(prep.windows, cfg.ablation, cfg.features, prep.set.sampling_rate_hz, prep.classes,
                                cfg.jobs);
    });
    ordered_json aj = ablation_json(report);
    ordered_json with_config = {{"schema_version", kSchemaVersion}, {"config", echo}};
    for (auto it = aj.begin(); it != aj.end(); ++it) with_config[it.key()] = it.value();
    files.emplace_back("ablation.json", dump(with_config));
    files.emplace_back("ablation.csv", ablation_csv(report));
    files.emplace_back("ranking.csv", ranking_csv(report));
    files.emplace_back("neighbour_compensation.csv", neighbour_compensation_csv(report));
    for (const auto& cls : report.classes) {
      files.emplace_back("criticality_plotdata_" + cls.class_label + ".csv", criticality_plot_csv(cls));
    }
    files.emplace_back("ablation_advice.md", advice_markdown(report));
    results["ablation"] = std::move(aj);
  }

  if (do_oracle) {
    OracleConfig ocfg = cfg.oracle;
    ocfg.seed = cfg.resolved_seed();
    const auto oracle = in_stage("oracle", [&] { return run_oracle_audit(matrices, prep.classes, ocfg, cfg.jobs); });
    files.emplace_back("oracle.csv", oracle_csv(oracle));
    const PairwiseAudit* ovo = one_vs_one(audits);
    std::vector<ValidationRow> validation;
    if (ovo) {
      validation = join_validation(*ovo, oracle);
      files.emplace_back("validation.csv", validation_csv(validation));
    }
    results["oracle"] = oracle_json(oracle);
    results["validation"] = validation_json(validation);
  }

  files.emplace_back("run_config.json", dump(echo));
  if (command == Command::kFull) {
    ordered_json names = ordered_json::array();
    for (const auto& f : files) names.push_back(f.first);
    names.push_back("audit_summary.json");
    ordered_json summary = outcome.summary;
    summary["artifacts"] = names;
    summary["results"] = results;
    files.emplace_back("audit_summary.json", dump(summary));
  }
  outcome.summary["results"] = std::move(results);

  write_artifacts(cfg, files);
  for (const auto& f : files) outcome.artifacts.push_back(f.first);
  outcome.summary["artifacts"] = outcome.artifacts;
  return outcome;
}

}  // namespace sensoraudit
