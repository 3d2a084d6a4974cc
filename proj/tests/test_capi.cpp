// Exercises the shared library through its C interface only, and the CLI
// binary as a subprocess.
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensoraudit/sensoraudit.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "sa_capi_XXXXXX").string();
    REQUIRE(mkdtemp(tmpl.data()) != nullptr);
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

struct Run {
  int status = -1;
  std::string output;
};

Run run_cli(const std::string& args) {
  const std::string cmd = std::string("'") + SENSORAUDIT_CLI + "' " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.output.append(buf, n);
  const int raw = pclose(p);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ordered_json spec_json(std::vector<std::string> classes, std::size_t channels, std::size_t trials) {
  ordered_json channel_list = ordered_json::array();
  for (std::size_t c = 0; c < channels; ++c) {
    ordered_json gains = ordered_json::array();
    for (std::size_t k = 0; k < classes.size(); ++k) gains.push_back(c == 0 ? 1.0 + 2.0 * static_cast<double>(k) : 1.0);
    channel_list.push_back({{"gains", gains}});
  }
  return {{"class_names", classes},
          {"sampling_rate_hz", 200},
          {"trials_per_class", trials},
          {"samples_per_trial", 640},
          {"channels", channel_list}};
}

fs::path write_spec(const fs::path& dir, const ordered_json& spec) {
  const fs::path p = dir / "spec.json";
  std::ofstream(p) << spec.dump();
  return p;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(sa_version()).size() > 0);
  CHECK(std::string(sa_status_name(SA_OK)) == "Ok");
  CHECK(std::string(sa_status_name(SA_ERR_OUTPUT_EXISTS)) == "OutputExists");
  sa_command cmd{};
  CHECK(sa_command_from_name("ingest-check", &cmd) == SA_OK);
  CHECK(cmd == SA_CMD_INGEST_CHECK);
  CHECK(sa_command_from_name("launch", &cmd) == SA_ERR_INVALID_ARGUMENT);
  CHECK(std::string(sa_last_error()).find("launch") != std::string::npos);
}

TEST_CASE("dataset handles") {
  TempDir tmp;
  const std::string spec = spec_json({"rock", "paper"}, 3, 4).dump();
  sa_dataset* ds = nullptr;
  REQUIRE(sa_dataset_synthesize(spec.c_str(), 9, &ds) == SA_OK);
  CHECK(sa_dataset_recording_count(ds) == 8);
  CHECK(sa_dataset_channel_count(ds) == 3);
  CHECK(sa_dataset_sampling_rate(ds) == 200.0);
  REQUIRE(sa_dataset_class_count(ds) == 2);
  CHECK(std::string(sa_dataset_class_name(ds, 0)) == "rock");
  CHECK(std::string(sa_dataset_class_name(ds, 1)) == "paper");
  std::size_t windows = 0;
  REQUIRE(sa_dataset_window_count(ds, nullptr, "paper", &windows) == SA_OK);
  CHECK(windows == 4);
  CHECK(sa_dataset_window_count(ds, nullptr, "lizard", &windows) == SA_ERR_UNKNOWN_CLASS_LABEL);

  const std::string root = (tmp.path / "data").string();
  REQUIRE(sa_dataset_write(ds, root.c_str(), 0) == SA_OK);
  CHECK(sa_dataset_write(ds, root.c_str(), 0) == SA_ERR_OUTPUT_EXISTS);
  CHECK(sa_dataset_write(ds, root.c_str(), 1) == SA_OK);

  sa_dataset* loaded = nullptr;
  REQUIRE(sa_dataset_load(root.c_str(), &loaded) == SA_OK);
  CHECK(sa_dataset_recording_count(loaded) == 8);
  CHECK(sa_dataset_channel_count(loaded) == 3);
  sa_dataset_free(loaded);
  sa_dataset_free(ds);

  const std::string missing = (tmp.path / "absent").string();
  sa_dataset* none = nullptr;
  CHECK(sa_dataset_load(missing.c_str(), &none) == SA_ERR_MISSING_FILE);
  CHECK(std::string(sa_last_error()).find("absent") != std::string::npos);
  CHECK(none == nullptr);
  CHECK(sa_dataset_synthesize("{not json", 1, &none) == SA_ERR_INVALID_ARGUMENT);
}

TEST_CASE("numeric entry points") {
  SUBCASE("separability") {
    // Dimension 0 is disjoint; dimension 1 is constant in both sets.
    const double target[] = {0.0, 1.0, 2.0, 1.0};
    const double reference[] = {4.0, 1.0, 6.0, 1.0};
    sa_separability s{};
    REQUIRE(sa_separability_scores(target, 2, reference, 2, 2, &s) == SA_OK);
    CHECK(s.f1 == 8.0);
    CHECK(s.f1_argmax == 0);
    CHECK(s.f2 == 0.0);
    CHECK(s.f3 == 1.0);
    CHECK(s.degenerate_dims == 1);
    REQUIRE(sa_separability_scores(target, 2, target, 2, 2, &s) == SA_OK);
    CHECK(s.f1 == 0.0);
    CHECK(s.f2 == 1.0);
    CHECK(s.f3 == 0.0);
    CHECK(sa_separability_scores(target, 1, reference, 2, 2, &s) == SA_ERR_TOO_FEW_ROWS);
    CHECK(sa_separability_scores(nullptr, 2, reference, 2, 2, &s) == SA_ERR_INVALID_ARGUMENT);
  }
  SUBCASE("features") {
    std::vector<double> samples(2 * 400);
    for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = (i % 7) - 3.0;
    std::vector<double> out(18);
    std::size_t len = 0;
    REQUIRE(sa_extract_features(samples.data(), 2, 400, 200.0, nullptr, out.data(), out.size(), &len) == SA_OK);
    CHECK(len == 18);
    std::vector<double> small(17);
    CHECK(sa_extract_features(samples.data(), 2, 400, 200.0, nullptr, small.data(), small.size(), &len) ==
          SA_ERR_INVALID_ARGUMENT);
    CHECK(len == 18);
    std::vector<double> silent(400, 0.0);
    REQUIRE(sa_extract_features(silent.data(), 1, 400, 200.0, nullptr, out.data(), out.size(), &len) == SA_OK);
    CHECK(len == 9);
    CHECK(out[2] == 0.0);  // zero crossings
    CHECK(out[4] == 0.0);  // rms
  }
  SUBCASE("mcc") {
    const int pred[] = {1, 1, 0, 0};
    const int truth[] = {1, 0, 0, 0};
    double m = 0.0;
    REQUIRE(sa_mcc(pred, truth, 4, &m) == SA_OK);
    CHECK(m == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(sa_mcc(pred, truth, 0, &m) == SA_ERR_LENGTH_MISMATCH);
  }
}

TEST_CASE("audit handles") {
  TempDir tmp;
  const fs::path spec = write_spec(tmp.path, spec_json({"rock", "paper", "scissors"}, 8, 5));
  ordered_json cfg = {{"synthetic", spec.string()}, {"output_dir", (tmp.path / "out").string()}, {"depth", 2}, {"seed", 3}};
  sa_audit* audit = nullptr;
  REQUIRE(sa_audit_create(cfg.dump().c_str(), &audit) == SA_OK);
  CHECK(sa_audit_summary(audit) == nullptr);
  REQUIRE(sa_audit_run(audit, SA_CMD_ABLATE) == SA_OK);
  const auto summary = ordered_json::parse(sa_audit_summary(audit));
  CHECK(summary.contains("artifacts"));
  const std::string csv = read_file(tmp.path / "out" / "ablation.csv");
  CHECK(line_count(csv) == 1 + 3 * 36);
  CHECK(sa_audit_run(audit, SA_CMD_ABLATE) == SA_ERR_OUTPUT_EXISTS);
  sa_audit_free(audit);

  const fs::path single = tmp.path / "single";
  fs::create_directories(single);
  const fs::path one = write_spec(single, spec_json({"rock"}, 2, 3));
  cfg = {{"synthetic", one.string()}, {"output_dir", (single / "out").string()}};
  REQUIRE(sa_audit_create(cfg.dump().c_str(), &audit) == SA_OK);
  CHECK(sa_audit_run(audit, SA_CMD_COMPLEXITY) == SA_ERR_TOO_FEW_CLASSES);
  sa_audit_free(audit);

  CHECK(sa_audit_create("{\"depth\": \"deep\"}", &audit) != SA_OK);
}

TEST_CASE("command line") {
  TempDir tmp;
  const fs::path spec = write_spec(tmp.path, spec_json({"rock", "paper", "scissors"}, 8, 5));
  const std::string out = (tmp.path / "out").string();

  const Run missing = run_cli("ingest-check --data '" + (tmp.path / "nowhere").string() + "'");
  CHECK(missing.status == 10);
  CHECK(missing.output.find("nowhere") != std::string::npos);

  const Run full = run_cli("full --synthetic '" + spec.string() + "' --out '" + out + "' --depth 2 --seed 42");
  REQUIRE(full.status == 0);
  for (const char* name : {"features.csv", "columns.json", "complexity.csv", "complexity.json",
                           "complexity_plotdata.csv", "ablation.json", "ablation.csv", "ranking.csv",
                           "neighbour_compensation.csv", "ablation_advice.md", "oracle.csv", "run_config.json",
                           "audit_summary.json"}) {
    CHECK_MESSAGE(fs::exists(fs::path(out) / name), name);
  }
  CHECK(line_count(read_file(fs::path(out) / "ablation.csv")) == 1 + 3 * 36);
  CHECK(line_count(read_file(fs::path(out) / "oracle.csv")) == 1 + 3);
  CHECK(full.output.rfind("full: wrote ", 0) == 0);

  const Run again = run_cli("complexity --synthetic '" + spec.string() + "' --out '" + out + "'");
  CHECK(again.status == 60);
  CHECK(run_cli("complexity --synthetic '" + spec.string() + "' --out '" + out + "' --overwrite").status == 0);

  const std::string data = (tmp.path / "data").string();
  REQUIRE(run_cli("synth --synthetic '" + spec.string() + "' --out '" + data + "'").status == 0);
  const Run check = run_cli("ingest-check --data '" + data + "'");
  REQUIRE(check.status == 0);
  const auto report = ordered_json::parse(check.output);
  CHECK(report.at("recordings") == 15);
  CHECK(report.at("channel_count") == 8);
  CHECK(report.at("classes").size() == 3);

  CHECK(run_cli("ablate --synthetic '" + spec.string() + "' --metric f9").status == 62);
  CHECK(run_cli("").status == 62);
}
