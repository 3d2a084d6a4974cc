/*
 * sensoraudit C interface.
 *
 * Every function that can fail returns an sa_status; on failure a message is
 * available from sa_last_error() on the calling thread until the next call.
 * Objects are opaque and owned by the caller once created; release them with
 * the matching *_free function. Strings returned by the library stay valid
 * until the owning object is freed or, for sa_last_error(), until the next
 * call on the same thread.
 */
#ifndef SENSORAUDIT_H
#define SENSORAUDIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SENSORAUDIT_BUILDING)
#    define SA_API __declspec(dllexport)
#  else
#    define SA_API __declspec(dllimport)
#  endif
#else
#  define SA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sa_status {
  SA_OK = 0,
  SA_ERR_INTERNAL = 1,
  SA_ERR_MISSING_FILE = 10,
  SA_ERR_MALFORMED_ROW = 11,
  SA_ERR_INCONSISTENT_CHANNEL_COUNT = 12,
  SA_ERR_UNKNOWN_CLASS_LABEL = 13,
  SA_ERR_TRIM_EXCEEDS_LENGTH = 14,
  SA_ERR_INVALID_SPEC = 15,
  SA_ERR_WINDOW_TOO_SHORT = 20,
  SA_ERR_TOO_FEW_ROWS = 30,
  SA_ERR_MISMATCHED_COLUMNS = 31,
  SA_ERR_TOO_FEW_CLASSES = 32,
  SA_ERR_INDEX_OUT_OF_RANGE = 40,
  SA_ERR_EMPTY_SPEC = 41,
  SA_ERR_TOPOLOGY_MISMATCH = 42,
  SA_ERR_EMPTY_TRAINING_SET = 50,
  SA_ERR_SINGLE_CLASS_TRAINING = 51,
  SA_ERR_LENGTH_MISMATCH = 52,
  SA_ERR_OUTPUT_EXISTS = 60,
  SA_ERR_IO = 61,
  SA_ERR_INVALID_ARGUMENT = 62
} sa_status;

typedef enum sa_command {
  SA_CMD_COMPLEXITY = 0,
  SA_CMD_ABLATE = 1,
  SA_CMD_ORACLE = 2,
  SA_CMD_FULL = 3,
  SA_CMD_SYNTH = 4,
  SA_CMD_INGEST_CHECK = 5
} sa_command;

typedef enum sa_metric { SA_METRIC_F1 = 0, SA_METRIC_F2 = 1, SA_METRIC_F3 = 2 } sa_metric;

typedef struct sa_dataset sa_dataset;
typedef struct sa_audit sa_audit;

typedef struct sa_separability {
  double f1;
  int64_t f1_argmax; /* -1 when no dimension qualifies */
  double f2;
  double f3;
  int64_t f3_argmax;
  size_t degenerate_dims;
} sa_separability;

SA_API const char* sa_version(void);
SA_API const char* sa_status_name(sa_status status);
SA_API const char* sa_last_error(void);

/* Datasets ---------------------------------------------------------------- */

SA_API sa_status sa_dataset_load(const char* root, sa_dataset** out);
/* spec_json: synthetic spec document. */
SA_API sa_status sa_dataset_synthesize(const char* spec_json, uint64_t seed, sa_dataset** out);
SA_API sa_status sa_dataset_write(const sa_dataset* dataset, const char* root, int overwrite);
SA_API size_t sa_dataset_recording_count(const sa_dataset* dataset);
SA_API size_t sa_dataset_channel_count(const sa_dataset* dataset);
SA_API double sa_dataset_sampling_rate(const sa_dataset* dataset);
SA_API size_t sa_dataset_class_count(const sa_dataset* dataset);
SA_API const char* sa_dataset_class_name(const sa_dataset* dataset, size_t index);
/* Windows per class under a segmentation config (JSON, NULL for defaults). */
SA_API sa_status sa_dataset_window_count(const sa_dataset* dataset, const char* segmentation_json,
                                         const char* class_name, size_t* out);
SA_API void sa_dataset_free(sa_dataset* dataset);

/* Audit runs --------------------------------------------------------------- */

/* run_config_json: run configuration (config_file, data | synthetic, seed,
 * output_dir, overwrite, jobs, metric, depth, include_rest, sections). */
SA_API sa_status sa_audit_create(const char* run_config_json, sa_audit** out);
SA_API sa_status sa_audit_run(sa_audit* audit, sa_command command);
/* JSON summary of the last successful run, or NULL. */
SA_API const char* sa_audit_summary(const sa_audit* audit);
SA_API void sa_audit_free(sa_audit* audit);
SA_API sa_status sa_command_from_name(const char* name, sa_command* out);

/* Numerics ----------------------------------------------------------------- */

/* samples: channels x length, channel-major. feature_config_json may be NULL.
 * Writes channels * enabled_features values to out. */
SA_API sa_status sa_extract_features(const double* samples, size_t channels, size_t length, double fs,
                                     const char* feature_config_json, double* out, size_t out_capacity,
                                     size_t* out_len);
/* Row-major target_rows x dims and reference_rows x dims matrices. */
SA_API sa_status sa_separability_scores(const double* target, size_t target_rows, const double* reference,
                                        size_t reference_rows, size_t dims, sa_separability* out);
SA_API sa_status sa_mcc(const int* predictions, const int* truth, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* SENSORAUDIT_H */
