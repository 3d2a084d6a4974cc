#include "sensoraudit/sensoraudit.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <string>

#include "sensoraudit/audit.hpp"
#include "sensoraudit/error.hpp"
#include "sensoraudit/features.hpp"
#include "sensoraudit/ingest.hpp"
#include "sensoraudit/oracle.hpp"
#include "sensoraudit/separability.hpp"

using nlohmann::ordered_json;
namespace sa = sensoraudit;

struct sa_dataset {
  sa::RecordingSet set;
};

struct sa_audit {
  sa::AuditRunConfig config;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
sa_status guarded(Fn&& fn) noexcept {
  g_last_error.clear();
  try {
    fn();
    return SA_OK;
  } catch (const sa::AuditError& e) {
    g_last_error = e.what();
    return static_cast<sa_status>(static_cast<int>(e.code()));
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return SA_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SA_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SA_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw sa::AuditError(sa::ErrorCode::kInvalidArgument, what);
}

ordered_json parse_optional(const char* text) {
  if (text == nullptr || *text == '\0') return ordered_json::object();
  return ordered_json::parse(text);
}

}  // namespace

extern "C" {

const char* sa_version(void) { return sa::kToolVersion; }

const char* sa_status_name(sa_status status) {
  switch (status) {
    case SA_OK: return "Ok";
    case SA_ERR_INTERNAL: return "Internal";
    default: break;
  }
  return sa::error_code_name(static_cast<sa::ErrorCode>(static_cast<int>(status)));
}

const char* sa_last_error(void) { return g_last_error.c_str(); }

sa_status sa_dataset_load(const char* root, sa_dataset** out) {
  return guarded([&] {
    require(root != nullptr && out != nullptr, "sa_dataset_load: null argument");
    *out = nullptr;
    auto ds = std::make_unique<sa_dataset>();
    ds->set = sa::load_dataset(root);
    *out = ds.release();
  });
}

sa_status sa_dataset_synthesize(const char* spec_json, uint64_t seed, sa_dataset** out) {
  return guarded([&] {
    require(spec_json != nullptr && out != nullptr, "sa_dataset_synthesize: null argument");
    *out = nullptr;
    const auto spec = ordered_json::parse(spec_json).get<sa::SyntheticSpec>();
    auto ds = std::make_unique<sa_dataset>();
    ds->set = sa::generate_synthetic(spec, seed);
    *out = ds.release();
  });
}

sa_status sa_dataset_write(const sa_dataset* dataset, const char* root, int overwrite) {
  return guarded([&] {
    require(dataset != nullptr && root != nullptr, "sa_dataset_write: null argument");
    sa::write_dataset(dataset->set, root, overwrite != 0);
  });
}

size_t sa_dataset_recording_count(const sa_dataset* dataset) {
  return dataset ? dataset->set.recordings.size() : 0;
}

size_t sa_dataset_channel_count(const sa_dataset* dataset) { return dataset ? dataset->set.channel_count : 0; }

double sa_dataset_sampling_rate(const sa_dataset* dataset) { return dataset ? dataset->set.sampling_rate_hz : 0.0; }

size_t sa_dataset_class_count(const sa_dataset* dataset) { return dataset ? dataset->set.class_names.size() : 0; }

const char* sa_dataset_class_name(const sa_dataset* dataset, size_t index) {
  if (!dataset || index >= dataset->set.class_names.size()) return nullptr;
  return dataset->set.class_names[index].c_str();
}

sa_status sa_dataset_window_count(const sa_dataset* dataset, const char* segmentation_json, const char* class_name,
                                  size_t* out) {
  return guarded([&] {
    require(dataset != nullptr && class_name != nullptr && out != nullptr, "sa_dataset_window_count: null argument");
    const auto& names = dataset->set.class_names;
    if (std::find(names.begin(), names.end(), class_name) == names.end()) {
      throw sa::AuditError(sa::ErrorCode::kUnknownClassLabel, std::string("unknown class '") + class_name + "'");
    }
    const auto cfg = parse_optional(segmentation_json).get<sa::SegmentationConfig>();
    std::size_t n = 0;
    for (const auto& w : sa::segment(dataset->set, cfg)) n += w.class_label == class_name ? 1 : 0;
    *out = n;
  });
}

void sa_dataset_free(sa_dataset* dataset) { delete dataset; }

sa_status sa_audit_create(const char* run_config_json, sa_audit** out) {
  return guarded([&] {
    require(run_config_json != nullptr && out != nullptr, "sa_audit_create: null argument");
    *out = nullptr;
    auto audit = std::make_unique<sa_audit>();
    audit->config = sa::parse_run_config(ordered_json::parse(run_config_json));
    audit->config.validate();
    *out = audit.release();
  });
}

sa_status sa_audit_run(sa_audit* audit, sa_command command) {
  return guarded([&] {
    require(audit != nullptr, "sa_audit_run: null audit");
    require(command >= SA_CMD_COMPLEXITY && command <= SA_CMD_INGEST_CHECK, "sa_audit_run: unknown command");
    audit->summary.clear();
    const auto outcome = sa::run_command(static_cast<sa::Command>(static_cast<int>(command)), audit->config);
    audit->summary = outcome.summary.dump(2);
  });
}

const char* sa_audit_summary(const sa_audit* audit) {
  if (!audit || audit->summary.empty()) return nullptr;
  return audit->summary.c_str();
}

void sa_audit_free(sa_audit* audit) { delete audit; }

sa_status sa_command_from_name(const char* name, sa_command* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "sa_command_from_name: null argument");
    *out = static_cast<sa_command>(static_cast<int>(sa::parse_command(name)));
  });
}

sa_status sa_extract_features(const double* samples, size_t channels, size_t length, double fs,
                              const char* feature_config_json, double* out, size_t out_capacity, size_t* out_len) {
  return guarded([&] {
    require(samples != nullptr && out != nullptr, "sa_extract_features: null argument");
    const auto cfg = parse_optional(feature_config_json).get<sa::FeatureConfig>();
    sa::WindowedSample sample;
    sample.data = sa::Matrix(channels, length);
    if (channels * length > 0) std::memcpy(sample.data.data().data(), samples, channels * length * sizeof(double));
    const auto values = sa::extract_features(sample, fs, cfg);
    if (out_len) *out_len = values.size();
    if (values.size() > out_capacity) {
      throw sa::AuditError(sa::ErrorCode::kInvalidArgument,
                           "output buffer holds " + std::to_string(out_capacity) + " values, need " +
                               std::to_string(values.size()));
    }
    std::memcpy(out, values.data(), values.size() * sizeof(double));
  });
}

sa_status sa_separability_scores(const double* target, size_t target_rows, const double* reference,
                                 size_t reference_rows, size_t dims, sa_separability* out) {
  return guarded([&] {
    require(target != nullptr && reference != nullptr && out != nullptr, "sa_separability_scores: null argument");
    sa::Matrix t(target_rows, dims);
    sa::Matrix r(reference_rows, dims);
    if (!t.empty()) std::memcpy(t.data().data(), target, target_rows * dims * sizeof(double));
    if (!r.empty()) std::memcpy(r.data().data(), reference, reference_rows * dims * sizeof(double));
    const auto s = sa::evaluate_separability(t, r);
    out->f1 = s.f1;
    out->f1_argmax = s.f1_argmax;
    out->f2 = s.f2;
    out->f3 = s.f3;
    out->f3_argmax = s.f3_argmax;
    out->degenerate_dims = s.degenerate_dims.size();
  });
}

sa_status sa_mcc(const int* predictions, const int* truth, size_t n, double* out) {
  return guarded([&] {
    require(predictions != nullptr && truth != nullptr && out != nullptr, "sa_mcc: null argument");
    *out = sa::evaluate_mcc({predictions, n}, {truth, n}).mcc;
  });
}

}  // extern "C"
