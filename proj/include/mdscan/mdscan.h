/* C interface of the mdscan library. All handles are opaque; every call
 * that can fail returns an mdscan_status and leaves a message retrievable
 * with mdscan_last_error() on the calling thread. */
#ifndef MDSCAN_MDSCAN_H
#define MDSCAN_MDSCAN_H

#include <stddef.h>
#include <stdint.h>

#if defined(MDSCAN_BUILDING_LIBRARY)
#define MDSCAN_API __attribute__((visibility("default")))
#else
#define MDSCAN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdscan_status {
  MDSCAN_OK = 0,
  MDSCAN_ERR_INVALID_ARGUMENT = 1,
  MDSCAN_ERR_IO = 2,
  MDSCAN_ERR_PARSE = 3,
  MDSCAN_ERR_DATA = 4,
  MDSCAN_ERR_INTERNAL = 5,
  /* mdscan_run produced a result, but the gamma fit was refused and the
   * conservative fallback gamma = n_tests was used. */
  MDSCAN_FIT_REFUSED = 6
} mdscan_status;

typedef enum mdscan_method { MDSCAN_FDR = 0, MDSCAN_FWER = 1 } mdscan_method;

typedef enum mdscan_mode { MDSCAN_MODE_AUTO = 0, MDSCAN_MODE_EQUAL = 1, MDSCAN_MODE_MIXED = 2 } mdscan_mode;

typedef struct mdscan_dataset mdscan_dataset;
typedef struct mdscan_result mdscan_result;

MDSCAN_API const char* mdscan_version(void);
MDSCAN_API const char* mdscan_last_error(void);
MDSCAN_API const char* mdscan_status_string(mdscan_status status);

/* Datasets. Paths equal to "-" mean standard input or output. */
MDSCAN_API mdscan_status mdscan_dataset_load(const char* path, const char* response, mdscan_dataset** out);
MDSCAN_API mdscan_status mdscan_dataset_fixture(const char* name, uint64_t seed, size_t n_objects,
                                                mdscan_dataset** out);
/* Attaches ground-truth group labels from a manifest written by bench generate. */
MDSCAN_API mdscan_status mdscan_dataset_attach_manifest(mdscan_dataset* dataset, const char* manifest_path);
MDSCAN_API size_t mdscan_dataset_n_objects(const mdscan_dataset* dataset);
MDSCAN_API size_t mdscan_dataset_n_descriptors(const mdscan_dataset* dataset);
MDSCAN_API size_t mdscan_dataset_dropped_rows(const mdscan_dataset* dataset);
MDSCAN_API mdscan_status mdscan_dataset_write_csv(const mdscan_dataset* dataset, const char* path);
MDSCAN_API void mdscan_dataset_free(mdscan_dataset* dataset);

typedef struct mdscan_synth_options {
  size_t n_objects;
  size_t group_sizes[7];
  double noise_amplitude;
  double nuisance_amplitude;
  size_t g7_support;
  const char* response; /* "sphere", "xor", "checkerboard" or "random" */
  uint64_t seed;
} mdscan_synth_options;

MDSCAN_API void mdscan_synth_options_init(mdscan_synth_options* options);
MDSCAN_API mdscan_status mdscan_synth_generate(const mdscan_synth_options* options, mdscan_dataset** out);
/* Writes the manifest of a dataset created by mdscan_synth_generate. */
MDSCAN_API mdscan_status mdscan_dataset_write_manifest(const mdscan_dataset* dataset, const char* path);

typedef void (*mdscan_progress_fn)(uint64_t done, uint64_t total, void* user);

typedef struct mdscan_run_options {
  unsigned k;
  unsigned bins;
  unsigned response_bins; /* 0 recodes the response as categories */
  unsigned n_shifts;
  double shift_magnitude;
  mdscan_method method;
  double alpha;
  unsigned workers; /* 0 = all hardware threads */
  uint64_t seed;
  unsigned contrast_copies;
  mdscan_mode mode;
  mdscan_progress_fn progress;
  void* progress_user;
  uint64_t progress_stride;
} mdscan_run_options;

MDSCAN_API void mdscan_run_options_init(mdscan_run_options* options);
/* Returns MDSCAN_OK or MDSCAN_FIT_REFUSED with *out set, or an error. */
MDSCAN_API mdscan_status mdscan_run(const mdscan_dataset* dataset, const mdscan_run_options* options,
                                    mdscan_result** out);

typedef struct mdscan_variable_info {
  const char* name;
  const char* group; /* empty when unknown */
  double max_cmi;
  uint64_t best_df;
  double p_min;
  double log_p_min;
  double final_p;
  double log_final_p;
  double adjusted_p;
  int relevant;
  size_t rank;
  uint64_t n_tests;
} mdscan_variable_info;

MDSCAN_API size_t mdscan_result_n_variables(const mdscan_result* result);
MDSCAN_API size_t mdscan_result_relevant_count(const mdscan_result* result);
MDSCAN_API double mdscan_result_gamma(const mdscan_result* result);
MDSCAN_API uint64_t mdscan_result_n_tests(const mdscan_result* result);
MDSCAN_API const char* mdscan_result_calibration(const mdscan_result* result);
/* Variables in rank order: index 0 holds rank 1. */
MDSCAN_API mdscan_status mdscan_result_variable(const mdscan_result* result, size_t index, mdscan_variable_info* out);
MDSCAN_API size_t mdscan_result_n_warnings(const mdscan_result* result);
MDSCAN_API mdscan_status mdscan_result_warning(const mdscan_result* result, size_t index, const char** name,
                                               const char** reason);
MDSCAN_API mdscan_status mdscan_result_write_tsv(const mdscan_result* result, const char* path);
MDSCAN_API mdscan_status mdscan_result_write_json(const mdscan_result* result, const char* path);
MDSCAN_API mdscan_status mdscan_result_write_pp(const mdscan_result* result, const char* path);
MDSCAN_API mdscan_status mdscan_result_export_selected(const mdscan_result* result, const mdscan_dataset* dataset,
                                                       const char* path);
MDSCAN_API void mdscan_result_free(mdscan_result* result);

/* Scores a report TSV against a manifest: Table-1 style found counts and
 * Table-2 style rank summaries. */
MDSCAN_API mdscan_status mdscan_bench_score(const char* report_path, const char* manifest_path, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif
