// Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit status 1 if
// any criterion fails. A Roshambo-format dataset is audited only when
// SENSORAUDIT_ROSHAMBO_DIR points at it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "sensoraudit/ablation.hpp"
#include "sensoraudit/features.hpp"
#include "sensoraudit/ingest.hpp"
#include "sensoraudit/oracle.hpp"
#include "sensoraudit/report.hpp"
#include "sensoraudit/separability.hpp"
#include "support.hpp"

namespace sa = sensoraudit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Kind { kPass, kFail, kSkip } kind = kPass;
  std::string detail;
};

Outcome pass(std::string d) { return {Outcome::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::kFail, std::move(d)}; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

sa::Matrix to_matrix(const satest::Table& t) {
  sa::Matrix m(t.rows, t.cols);
  for (std::size_t r = 0; r < t.rows; ++r) {
    for (std::size_t c = 0; c < t.cols; ++c) m(r, c) = t.at(r, c);
  }
  return m;
}

// ---------------------------------------------------------------------------

Outcome metric_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> dims(1, 5), rows(2, 20), kind(0, 3), small(0, 3);
  std::normal_distribution<double> g(0.0, 1.0);
  int mismatches = 0;
  std::string first;
  for (int inst = 0; inst < 500; ++inst) {
    const std::size_t d = static_cast<std::size_t>(dims(rng));
    satest::Table a{static_cast<std::size_t>(rows(rng)), d, {}};
    satest::Table b{static_cast<std::size_t>(rows(rng)), d, {}};
    // Column kinds: continuous, small integers (ties, shared extremes),
    // constant in one class, constant in both.
    std::vector<int> kinds(d);
    for (auto& k : kinds) k = kind(rng);
    const double shift = g(rng) * 2.0;
    const double scale = std::exp(g(rng));
    auto fill = [&](satest::Table& t, double offset, double c1, double c2) {
      t.v.resize(t.rows * t.cols);
      for (std::size_t r = 0; r < t.rows; ++r) {
        for (std::size_t c = 0; c < t.cols; ++c) {
          double v = 0.0;
          switch (kinds[c]) {
            case 0: v = offset + scale * g(rng); break;
            case 1: v = static_cast<double>(small(rng)) + (offset > 0 ? 1.0 : 0.0); break;
            case 2: v = offset > 0 ? c1 : g(rng); break;
            default: v = offset > 0 ? c1 : c2; break;
          }
          t.v[r * t.cols + c] = v;
        }
      }
    };
    const double c1 = std::round(g(rng) * 2.0), c2 = std::round(g(rng) * 2.0);
    fill(a, shift > 0 ? shift : 0.0, c1, c2);
    fill(b, shift > 0 ? 0.0 : -shift + 0.5, c2, c1);

    const auto ref = satest::naive_separability(a, b);
    const auto got = sa::evaluate_separability(to_matrix(a), to_matrix(b));
    const bool ok = satest::close_rel(got.f1, ref.f1, 1e-12) && satest::close_rel(got.f2, ref.f2, 1e-12) &&
                    satest::close_rel(got.f3, ref.f3, 1e-12) && got.f1_argmax == ref.f1_argmax &&
                    got.f3_argmax == ref.f3_argmax;
    if (!ok) {
      if (mismatches == 0) {
        first = "instance " + std::to_string(inst) + ": f1 " + fmt(got.f1) + "/" + fmt(ref.f1) + " f2 " +
                fmt(got.f2) + "/" + fmt(ref.f2) + " f3 " + fmt(got.f3) + "/" + fmt(ref.f3);
      }
      ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  std::string detail = "500 instances, " + std::to_string(mismatches) + " mismatches, " + fmt(secs) + " s";
  if (mismatches > 0) return fail(detail + "; " + first);
  if (secs >= 5.0) return fail(detail + " (limit 5 s)");
  return pass(detail);
}

// ---------------------------------------------------------------------------

Outcome analytic_fixtures() {
  auto col = [](std::vector<double> v) {
    sa::Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
  };
  std::vector<std::string> failures;
  auto check = [&](const std::string& name, double got, double want, double tol) {
    const bool ok = tol == 0.0 ? got == want : std::fabs(got - want) <= tol * std::max(1.0, std::fabs(want));
    if (!ok) failures.push_back(name + "=" + fmt(got));
  };

  const sa::Matrix same = col({0.5, 1.5, 2.5, 4.0});
  const auto ident = sa::evaluate_separability(same, same);
  check("F2(identical)", ident.f2, 1.0, 0.0);
  check("F3(identical)", ident.f3, 0.0, 0.0);
  check("F1(identical)", ident.f1, 0.0, 0.0);

  const auto disjoint = sa::evaluate_separability(col({0.0, 1.0}), col({2.0, 3.0}));
  check("F2(disjoint)", disjoint.f2, 0.0, 0.0);
  check("F3(disjoint)", disjoint.f3, 1.0, 0.0);

  // Means 0 and 2, population variances 1 and 1.
  const auto fisher = sa::evaluate_separability(col({-1.0, 1.0}), col({1.0, 3.0}));
  check("F1(0/2,1/1)", fisher.f1, 2.0, 0.0);

  const auto spans = sa::evaluate_separability(col({0.0, 1.0, 2.0}), col({1.0, 2.0, 3.0}));
  check("F2([0,2],[1,3])", spans.f2, 1.0 / 3.0, 1e-12);
  check("F3([0,2],[1,3])", spans.f3, 2.0 / 3.0, 1e-12);

  if (!failures.empty()) {
    std::string d;
    for (const auto& f : failures) d += (d.empty() ? "" : ", ") + f;
    return fail(d);
  }
  return pass("F2=1/0, F3=0/1, F1=2 exactly, F2=1/3 and F3=2/3 within 1e-12");
}

// ---------------------------------------------------------------------------

Outcome feature_suite() {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& name) {
    if (!ok) failures.push_back(name);
  };
  const double fs = 200.0;
  const std::vector<double> constant(400, 2.5), zeros(400, 0.0);
  std::vector<double> ramp(400);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.01 * static_cast<double>(i);

  // Shannon entropy.
  expect(sa::shannon_entropy(constant, 128) == 0.0, "entropy(constant)");
  std::vector<double> two(400);
  for (std::size_t i = 0; i < two.size(); ++i) two[i] = i % 2 ? 3.0 : -1.0;
  expect(std::fabs(sa::shannon_entropy(two, 128) - 1.0) < 1e-12, "entropy(two values)");
  std::vector<double> spread(128);
  for (std::size_t i = 0; i < spread.size(); ++i) spread[i] = static_cast<double>(i);
  expect(std::fabs(sa::shannon_entropy(spread, 128) - 7.0) < 1e-12, "entropy(uniform 128)");

  // Sample entropy.
  expect(sa::sample_entropy(constant, 2, 0.2).value == 0.0, "sampen(constant)");
  {
    const auto r = sa::sample_entropy(ramp, 2, 0.001);
    const double cap = std::log(398.0 * 397.0);
    expect(r.capped && std::fabs(r.value - cap) < 1e-12, "sampen(ramp) capped");
  }
  {
    const auto x = satest::uniform_noise(400, 1);
    const auto r = sa::sample_entropy(x, 2, 0.2);
    const double cap = std::log(398.0 * 397.0);
    expect(!r.capped && r.value > 0.0 && r.value < cap &&
               satest::close_rel(r.value, satest::naive_sample_entropy(x, 2, 0.2), 1e-12),
           "sampen(uniform noise, seed 1)");
  }
  int sampen_mismatch = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t w = 20 + static_cast<std::size_t>(seed * 37 % 181);  // 20..200
    const auto x = satest::gaussian_noise(w, 1000 + seed);
    bool ref_capped = false;
    const double ref = satest::naive_sample_entropy(x, 2, 0.2, &ref_capped);
    const auto got = sa::sample_entropy(x, 2, 0.2);
    if (got.value != ref || got.capped != ref_capped) ++sampen_mismatch;
  }
  expect(sampen_mismatch == 0, "sampen vs O(W^2) reference (" + std::to_string(sampen_mismatch) + "/50)");

  // Zero crossings, waveform length, RMS, slope sign changes.
  expect(sa::zero_crossings(std::vector<double>{1, -1, 1, -1}, 0.0) == 3, "zc([1,-1,1,-1])");
  expect(sa::zero_crossings(constant, 0.0) == 0, "zc(constant)");
  expect(sa::zero_crossings(zeros, 0.0) == 0, "zc(zeros)");
  expect(sa::waveform_length(constant) == 0.0, "wl(constant)");
  expect(sa::waveform_length(std::vector<double>{0, 1, 0, 1}) == 3.0, "wl([0,1,0,1])");
  expect(sa::waveform_length(std::vector<double>{0, 2}) == 2.0, "wl([0,2])");
  expect(sa::rms(constant) == 2.5, "rms(constant)");
  expect(std::fabs(sa::rms(std::vector<double>{3, -4}) - std::sqrt(12.5)) < 1e-15, "rms([3,-4])");
  expect(sa::rms(zeros) == 0.0, "rms(zeros)");
  expect(sa::slope_sign_changes(ramp, 0.0) == 0, "ssc(ramp)");
  expect(sa::slope_sign_changes(std::vector<double>{0, 1, 0, 1}, 0.0) == 2, "ssc([0,1,0,1])");
  expect(sa::slope_sign_changes(constant, 0.0) == 0, "ssc(constant)");

  // Median frequency.
  std::vector<double> tone(400);
  for (std::size_t i = 0; i < tone.size(); ++i) {
    tone[i] = std::sin(2.0 * std::acos(-1.0) * 25.0 * static_cast<double>(i) / fs);
  }
  expect(std::fabs(sa::median_frequency(tone, fs) - 25.0) <= 0.5, "mdf(25 Hz)");
  expect(sa::median_frequency(constant, fs) == 0.0, "mdf(constant)");
  double mdf_sum = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    mdf_sum += sa::median_frequency(satest::gaussian_noise(400, 5000 + seed), fs);
  }
  expect(std::fabs(mdf_sum / 100.0 - 50.0) <= 3.0, "mdf(white noise) mean " + fmt(mdf_sum / 100.0));

  // Wavelet energy.
  expect(sa::wavelet_energy(zeros, 4) == 0.0, "we(zeros)");
  expect(sa::wavelet_energy(constant, 4) < 1e-24, "we(constant)");
  expect(std::fabs(sa::wavelet_energy(std::vector<double>{1, -1}, 1) - 2.0) < 1e-15, "we([1,-1])");
  int haar_bad = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (std::size_t levels : {1, 3, 4, 6}) {
      const auto x = satest::gaussian_noise(256, 7000 + seed);
      double total = 0.0;
      for (double v : x) total += v * v;
      const double sum = sa::wavelet_energy(x, levels) + satest::haar_approximation_energy(x, levels);
      if (std::fabs(sum - total) > 1e-9 * total) ++haar_bad;
    }
  }
  expect(haar_bad == 0, "haar energy conservation");

  // Fractal dimension.
  expect(std::fabs(sa::fractal_dimension(ramp) - 1.0) < 1e-12, "fd(ramp)");
  expect(sa::fractal_dimension(constant) == 1.0, "fd(constant)");
  {
    const auto x = satest::gaussian_noise(400, 3);
    const double v = sa::fractal_dimension(x);
    expect(v > 1.0 && v < 2.0 && satest::close_rel(v, satest::naive_katz(x), 1e-12), "fd(noise, seed 3)");
  }

  // Whole-window extraction.
  sa::FeatureConfig cfg;
  sa::WindowedSample zero_sample;
  zero_sample.data = sa::Matrix(8, 400);
  const auto zv = sa::extract_features(zero_sample, fs, cfg);
  expect(zv.size() == 72, "72-vector");
  const double conventions[9] = {0, 0, 0, 0, 0, 0, 0, 0, 1};
  bool zero_ok = zv.size() == 72;
  for (std::size_t i = 0; zero_ok && i < zv.size(); ++i) zero_ok = zv[i] == conventions[i % 9];
  expect(zero_ok, "all-zero sample conventions");

  if (!failures.empty()) {
    std::string d;
    for (const auto& f : failures) d += (d.empty() ? "" : "; ") + f;
    return fail(d);
  }
  return pass("all extractor examples, SampEn 50/50 exact, Haar conservation, MDF white-noise mean " +
              fmt(mdf_sum / 100.0) + " Hz");
}

// ---------------------------------------------------------------------------

struct PreparedSet {
  std::vector<sa::WindowedSample> windows;
  std::map<std::string, sa::FeatureMatrix> matrices;
  std::vector<std::string> classes;
  double fs = 0.0;
};

PreparedSet prepare(const sa::RecordingSet& set, bool with_matrices, unsigned jobs = 1) {
  PreparedSet p;
  p.windows = sa::segment(set, sa::SegmentationConfig{});
  p.classes = set.class_names;
  p.fs = set.sampling_rate_hz;
  if (with_matrices) p.matrices = sa::build_class_matrices(p.windows, p.fs, sa::FeatureConfig{}, jobs);
  return p;
}

Outcome proxy_validity() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kDatasets = 20;
  double tau_sum = 0.0;
  int low_pair_min = 0;
  for (int ds = 0; ds < kDatasets; ++ds) {
    const std::uint64_t seed = 100 + static_cast<std::uint64_t>(ds);
    const auto p = prepare(sa::generate_synthetic(satest::graded_spec(150), seed), true);
    const auto audit = sa::pairwise_audit(p.matrices, p.classes, sa::AuditMode::kOneVsOne);
    sa::OracleConfig ocfg;
    ocfg.seed = seed;
    const auto oracle = sa::run_oracle_audit(p.matrices, p.classes, ocfg);

    std::vector<double> fdr, mcc;
    double min_fdr = 1e300;
    std::string min_pair;
    for (const auto& pr : audit.pairs) {
      fdr.push_back(pr.raw_fdr);
      for (const auto& o : oracle) {
        const bool match = (o.class_a == pr.target && o.class_b == pr.reference) ||
                           (o.class_a == pr.reference && o.class_b == pr.target);
        if (match) mcc.push_back(o.mcc);
      }
      if (pr.raw_fdr < min_fdr) {
        min_fdr = pr.raw_fdr;
        min_pair = pr.target + pr.reference;
      }
    }
    if (mcc.size() != fdr.size()) return fail("oracle pairs do not match separability pairs");
    tau_sum += satest::kendall_tau_b(fdr, mcc);
    if (min_pair == "ab" || min_pair == "ba") ++low_pair_min;
  }
  const double secs = seconds_since(t0);
  const double mean_tau = tau_sum / kDatasets;
  const std::string detail = std::to_string(kDatasets) + " datasets, mean Kendall tau " + fmt(mean_tau) +
                             ", low pair minimal in " + std::to_string(low_pair_min) + "/" +
                             std::to_string(kDatasets) + ", " + fmt(secs) + " s";
  if (mean_tau > 0.6 && low_pair_min == kDatasets && secs < 120.0) return pass(detail);
  return fail(detail);
}

// ---------------------------------------------------------------------------

Outcome criticality_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr int kSeeds = 20;
  constexpr std::size_t kClasses = 3, kChannels = 8;
  int top_hits = 0, top_total = 0, redundant_ok = 0;
  for (int s = 0; s < kSeeds; ++s) {
    const auto set = sa::generate_synthetic(satest::one_informative_spec(kClasses, kChannels, 40),
                                            500 + static_cast<std::uint64_t>(s));
    const auto p = prepare(set, false);
    const auto report = sa::run_ablation_audit(p.windows, sa::AblationSpec{}, sa::FeatureConfig{}, p.fs, p.classes);
    bool all_redundant_low = true;
    for (std::size_t c = 0; c < report.classes.size(); ++c) {
      const auto& crit = report.classes[c].sensor_criticality;
      std::size_t top = 0;
      for (std::size_t k = 1; k < crit.size(); ++k) {
        if (crit[k] > crit[top]) top = k;
      }
      ++top_total;
      if (top == c) ++top_hits;
      // Channels kClasses.. are idle for every class.
      for (std::size_t k = kClasses; k < kChannels; ++k) all_redundant_low = all_redundant_low && crit[k] < 0.3;
    }
    if (all_redundant_low) ++redundant_ok;
  }
  const double secs = seconds_since(t0);
  const double top_rate = static_cast<double>(top_hits) / top_total;
  const double red_rate = static_cast<double>(redundant_ok) / kSeeds;
  const std::string detail = "informative channel top in " + std::to_string(top_hits) + "/" +
                             std::to_string(top_total) + " class audits, redundant < 0.3 in " +
                             std::to_string(redundant_ok) + "/" + std::to_string(kSeeds) + " seeds, " +
                             fmt(secs) + " s";
  if (top_rate >= 0.95 && red_rate >= 0.90 && secs < 120.0) return pass(detail);
  return fail(detail);
}

// ---------------------------------------------------------------------------

Outcome roshambo_reproduction() {
  const char* root = std::getenv("SENSORAUDIT_ROSHAMBO_DIR");
  if (root == nullptr || *root == '\0' || !fs::exists(root)) {
    return {Outcome::kSkip, "no Roshambo-format dataset (set SENSORAUDIT_ROSHAMBO_DIR)"};
  }
  const auto set = sa::load_dataset(root);
  auto p = prepare(set, true, 4);
  std::vector<std::string> gestures;
  for (const auto& c : p.classes) {
    if (c != "rest") gestures.push_back(c);
  }
  const auto audit = sa::pairwise_audit(p.matrices, gestures, sa::AuditMode::kOneVsOne);
  auto is_ps = [](const std::string& a, const std::string& b) {
    return (a == "paper" && b == "scissors") || (a == "scissors" && b == "paper");
  };
  double ps = -1.0, others_min = 1e300;
  for (const auto& pr : audit.pairs) {
    if (is_ps(pr.target, pr.reference)) {
      ps = pr.normalized_fdr;
    } else {
      others_min = std::min(others_min, pr.normalized_fdr);
    }
  }
  const bool fdr_ok = ps >= 0.0 && others_min > ps && others_min >= 5.0 * ps;

  sa::OracleConfig ocfg;
  const auto oracle = sa::run_oracle_audit(p.matrices, gestures, ocfg, 4);
  double ps_mcc = -2.0, other_mcc_min = 2.0;
  for (const auto& o : oracle) {
    if (is_ps(o.class_a, o.class_b)) {
      ps_mcc = o.mcc;
    } else {
      other_mcc_min = std::min(other_mcc_min, o.mcc);
    }
  }
  const bool mcc_ok = ps_mcc > -2.0 && ps_mcc < other_mcc_min;

  sa::AblationSpec spec;
  spec.classes = gestures;
  const auto report = sa::run_ablation_audit(p.windows, spec, sa::FeatureConfig{}, p.fs, gestures, 4);
  bool bottom_ok = false;
  if (report.ranking.size() >= 7) {
    const std::size_t n = report.ranking.size();
    int hits = 0;
    for (std::size_t i = n - 3; i < n; ++i) hits += report.ranking[i].sensor == 5 || report.ranking[i].sensor == 6;
    bottom_ok = hits == 2;
  }
  const std::string detail = "paper-vs-scissors normalized FDR " + fmt(ps) + " vs others >= " + fmt(others_min) +
                             ", MCC " + fmt(ps_mcc) + " vs others >= " + fmt(other_mcc_min) +
                             ", sensors 6/7 in bottom three: " + (bottom_ok ? "yes" : "no");
  return fdr_ok && mcc_ok && bottom_ok ? pass(detail) : fail(detail);
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files[e.path().filename().string()] = sa::read_file(e.path());
  }
  return files;
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / ("sensoraudit_accept_" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);
  const fs::path spec_path = base / "synthetic.json";
  {
    auto spec = satest::one_informative_spec(3, 8, 20);
    spec.seed = 11;
    nlohmann::ordered_json j = spec;
    sa::write_file(spec_path, j.dump(2));
  }
  auto run = [&](const std::string& out, unsigned jobs) {
    const std::string cmd = std::string("\"") + SENSORAUDIT_CLI + "\" full --synthetic \"" + spec_path.string() +
                            "\" --seed 42 --out \"" + (base / out).string() + "\" --jobs " +
                            std::to_string(jobs) + " > /dev/null";
    return std::system(cmd.c_str());
  };
  if (run("a", 1) != 0 || run("b", 1) != 0 || run("c", 8) != 0) {
    fs::remove_all(base);
    return fail("cmd_full exited nonzero");
  }
  const auto a = snapshot(base / "a"), b = snapshot(base / "b"), c = snapshot(base / "c");
  fs::remove_all(base);
  if (a.empty()) return fail("no artifacts written");
  if (a != b) return fail("repeat run differs");
  if (a != c) {
    for (const auto& [name, body] : a) {
      auto it = c.find(name);
      if (it == c.end() || it->second != body) return fail("--jobs 8 differs in " + name);
    }
    return fail("--jobs 8 wrote a different file set");
  }
  return pass(std::to_string(a.size()) + " artifacts byte-identical across two runs and --jobs 1 vs 8");
}

// ---------------------------------------------------------------------------

Outcome oracle_numerics() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> in(1, 6), hid(1, 10), rows(2, 20), bit(0, 1);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  int bad = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t ni = static_cast<std::size_t>(in(rng));
    const std::size_t nh = static_cast<std::size_t>(hid(rng));
    const std::size_t nr = static_cast<std::size_t>(rows(rng));
    sa::Mlp net(ni, nh, 1000 + static_cast<std::uint64_t>(inst));
    sa::Matrix x(nr, ni);
    std::vector<int> y(nr);
    for (std::size_t r = 0; r < nr; ++r) {
      for (std::size_t c = 0; c < ni; ++c) x(r, c) = g(rng);
      y[r] = bit(rng);
    }
    const auto analytic = net.gradient(x, y);
    auto params = net.parameters();
    for (std::size_t p = 0; p < params.size(); ++p) {
      const double saved = params[p];
      const double h = 1e-5;
      params[p] = saved + h;
      const double up = net.loss(x, y);
      params[p] = saved - h;
      const double down = net.loss(x, y);
      params[p] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double rel = std::fabs(analytic[p] - numeric) / std::max({std::fabs(analytic[p]), std::fabs(numeric), 1e-6});
      worst = std::max(worst, rel);
      if (rel > 1e-4) ++bad;
    }
  }

  std::vector<std::string> failures;
  if (bad > 0) failures.push_back(std::to_string(bad) + " gradient entries off (worst " + fmt(worst) + ")");
  const std::vector<int> truth = {1, 1, 0, 0, 1, 0};
  std::vector<int> inverted;
  for (int t : truth) inverted.push_back(1 - t);
  if (sa::evaluate_mcc(truth, truth).mcc != 1.0) failures.push_back("MCC(perfect)");
  if (sa::evaluate_mcc(inverted, truth).mcc != -1.0) failures.push_back("MCC(inverted)");
  sa::Confusion c{45, 45, 5, 5};
  if (sa::matthews(c) != 0.8) failures.push_back("MCC(45/45/5/5)=" + fmt(sa::matthews(c)));

  if (!failures.empty()) {
    std::string d;
    for (const auto& f : failures) d += (d.empty() ? "" : "; ") + f;
    return fail(d);
  }
  return pass("20 networks, worst gradient relative error " + fmt(worst) + "; MCC fixtures 1, -1, 0.8 exact");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"metric correctness vs brute-force evaluator", metric_correctness},
      {"analytic separability fixtures", analytic_fixtures},
      {"feature extractor suite", feature_suite},
      {"stage 1 proxy validity (FDR vs MCC rank agreement)", proxy_validity},
      {"stage 2 criticality recovery", criticality_recovery},
      {"dataset reproduction (Roshambo)", roshambo_reproduction},
      {"determinism of full audit", determinism},
      {"oracle numerics", oracle_numerics},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.kind == Outcome::kPass ? "PASS" : o.kind == Outcome::kFail ? "FAIL" : "SKIP";
    if (o.kind == Outcome::kFail) ++failures;
    std::printf("%s criterion %zu: %s -- %s\n", tag, i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
