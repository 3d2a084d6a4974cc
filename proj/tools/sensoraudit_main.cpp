// sensoraudit command-line front end. Everything goes through the C API.

#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sensoraudit/sensoraudit.h"

namespace {

struct Flags {
  std::string data;
  std::string synthetic;
  std::string config;
  std::string out;
  std::optional<unsigned long long> seed;
  std::string metric;
  std::optional<std::size_t> depth;
  bool include_rest = false;
  bool overwrite = false;
  std::optional<unsigned> jobs;
};

void add_common(CLI::App* cmd, Flags& f, bool analysis) {
  auto* data = cmd->add_option("--data", f.data, "dataset root (<participant>/<session>/<class>_<trial>.csv)");
  auto* synth = cmd->add_option("--synthetic", f.synthetic, "synthetic spec JSON");
  data->excludes(synth);
  cmd->add_option("--config", f.config, "audit.json run configuration");
  cmd->add_option("--out", f.out, "output directory (default audit_out)");
  cmd->add_option("--seed", f.seed, "global seed");
  cmd->add_flag("--overwrite", f.overwrite, "replace existing output files");
  cmd->add_option("--jobs", f.jobs, "worker threads (default 1)")->check(CLI::PositiveNumber);
  if (analysis) {
    cmd->add_option("--metric", f.metric, "ablation shift metric")->check(CLI::IsMember({"f1", "f2", "f3"}));
    cmd->add_option("--depth", f.depth, "ablation combinatorial depth")->check(CLI::PositiveNumber);
    cmd->add_flag("--include-rest", f.include_rest, "include the rest/control class");
  }
}

nlohmann::ordered_json run_config(const Flags& f) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  if (!f.config.empty()) j["config_file"] = f.config;
  if (!f.data.empty()) j["data"] = f.data;
  if (!f.synthetic.empty()) j["synthetic"] = f.synthetic;
  if (!f.out.empty()) j["output_dir"] = f.out;
  if (f.seed) j["seed"] = *f.seed;
  if (!f.metric.empty()) j["metric"] = f.metric;
  if (f.depth) j["depth"] = *f.depth;
  if (f.include_rest) j["include_rest"] = true;
  if (f.overwrite) j["overwrite"] = true;
  if (f.jobs) j["jobs"] = *f.jobs;
  return j;
}

int fail(sa_status status) {
  std::fprintf(stderr, "sensoraudit: %s: %s\n", sa_status_name(status), sa_last_error());
  return static_cast<int>(status);
}

struct AuditDeleter {
  void operator()(sa_audit* a) const { sa_audit_free(a); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-free separability and sensor fault-tolerance audit for multi-channel recordings"};
  app.set_version_flag("--version", std::string(sa_version()));
  app.require_subcommand(1);

  Flags flags;
  const std::pair<const char*, const char*> commands[] = {
      {"complexity", "pairwise task separability (F1/F2/F3)"},
      {"ablate", "sensor criticality by simulated failure"},
      {"oracle", "one-vs-one MLP validation scored by MCC"},
      {"full", "complexity, ablate and oracle in one pass"},
      {"synth", "write a synthetic dataset to --out"},
      {"ingest-check", "validate a dataset and report window counts"},
  };
  for (const auto& [name, help] : commands) {
    const std::string n = name;
    add_common(app.add_subcommand(name, help), flags, n != "synth" && n != "ingest-check");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(SA_ERR_INVALID_ARGUMENT);
  }

  const std::string name = app.get_subcommands().front()->get_name();
  sa_command command{};
  if (sa_status st = sa_command_from_name(name.c_str(), &command); st != SA_OK) return fail(st);

  sa_audit* raw = nullptr;
  const std::string cfg = run_config(flags).dump();
  if (sa_status st = sa_audit_create(cfg.c_str(), &raw); st != SA_OK) return fail(st);
  std::unique_ptr<sa_audit, AuditDeleter> audit(raw);

  if (sa_status st = sa_audit_run(audit.get(), command); st != SA_OK) return fail(st);

  const auto summary = nlohmann::ordered_json::parse(sa_audit_summary(audit.get()));
  if (command == SA_CMD_INGEST_CHECK) {
    std::printf("%s\n", summary.at("dataset").dump(2).c_str());
    return 0;
  }
  const auto& artifacts = summary.at("artifacts");
  std::printf("%s: wrote %zu artifact(s)\n", name.c_str(), artifacts.size());
  for (const auto& a : artifacts) std::printf("  %s\n", a.get<std::string>().c_str());
  return 0;
}
