#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensoraudit/ablation.hpp"
#include "sensoraudit/features.hpp"
#include "sensoraudit/ingest.hpp"
#include "sensoraudit/oracle.hpp"
#include "sensoraudit/separability.hpp"

namespace sensoraudit {

inline constexpr const char* kSchemaVersion = "1.0";
inline constexpr const char* kToolVersion = "0.1.0";

enum class Command { kComplexity, kAblate, kOracle, kFull, kSynth, kIngestCheck };

const char* command_name(Command c) noexcept;
Command parse_command(std::string_view name);

enum class ComplexityMode { kOneVsOne, kOneVsRest, kBoth };

// Everything one audit run needs. Exactly one of dataset_root and
// synthetic_spec is set.
struct AuditRunConfig {
  std::optional<std::filesystem::path> dataset_root;
  std::optional<std::filesystem::path> synthetic_spec_path;
  std::optional<SyntheticSpec> synthetic_spec;
  SegmentationConfig segmentation;
  FeatureConfig features;
  AblationSpec ablation;
  OracleConfig oracle;
  ComplexityMode complexity_mode = ComplexityMode::kOneVsOne;
  std::filesystem::path output_dir = "audit_out";
  std::optional<std::uint64_t> seed;
  bool include_rest = false;
  bool overwrite = false;
  unsigned jobs = 1;

  void validate() const;
  // Seed precedence: explicit seed, then the synthetic spec's seed, then 0.
  std::uint64_t resolved_seed() const;
};

// Accepted keys (all optional unless noted):
//   config_file   path of an audit.json whose contents are applied first
//   data | synthetic   dataset root or synthetic spec path (exactly one)
//   seed, include_rest, complexity_mode ("one_vs_one"|"one_vs_rest"|"both")
//   segmentation, features, ablation, oracle   objects, or paths to
//                 features.json / ablation.json / oracle.json style files
//   output_dir, overwrite, jobs, metric ("f1"|"f2"|"f3"), depth
// Relative paths inside a file resolve against that file's directory.
AuditRunConfig parse_run_config(const nlohmann::ordered_json& j);

// Resolved configuration as embedded in artifacts. Omits the output
// directory and thread count, which do not influence results.
nlohmann::ordered_json config_echo(const AuditRunConfig& cfg);

struct RunOutcome {
  nlohmann::ordered_json summary;
  std::vector<std::string> artifacts;  // file names written, in write order
};

// Runs one subcommand. All computation finishes before any file is written;
// existing artifacts are replaced only with cfg.overwrite. Errors carry the
// failing stage in their message.
RunOutcome run_command(Command command, const AuditRunConfig& cfg);

}  // namespace sensoraudit
