// Copyright 2026 The sdcagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * C interface to the sdcagg microdata anonymization library.
 *
 * All objects are opaque handles created by sdcagg_*_load / sdcagg_*_create
 * style calls and released with the matching *_free function. Every fallible
 * call returns an sdcagg_status; on failure sdcagg_last_error() describes
 * the problem (the message is thread-local and valid until the next call on
 * the same thread). Strings returned through `char**` out-parameters are
 * heap-allocated and must be released with sdcagg_string_free().
 */

#ifndef SDCAGG_SDCAGG_H_
#define SDCAGG_SDCAGG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SDCAGG_BUILDING_LIBRARY)
#    define SDCAGG_API __declspec(dllexport)
#  else
#    define SDCAGG_API __declspec(dllimport)
#  endif
#else
#  define SDCAGG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sdcagg_status {
  SDCAGG_OK = 0,
  SDCAGG_ERR_INVALID_ARGUMENT = 1, /* bad parameter or precondition */
  SDCAGG_ERR_IO = 2,               /* file could not be read or written */
  SDCAGG_ERR_DATA = 3,             /* malformed table/schema, shape mismatch */
  SDCAGG_ERR_METHOD = 4,           /* method cannot satisfy the request */
  SDCAGG_ERR_SPEC = 5,             /* malformed sweep specification */
  SDCAGG_ERR_INTERNAL = 6
} sdcagg_status;

typedef enum sdcagg_normalize {
  SDCAGG_NORMALIZE_LENIENT = 0, /* constant columns scale to 0 */
  SDCAGG_NORMALIZE_STRICT = 1   /* constant columns are an error */
} sdcagg_normalize;

typedef struct sdcagg_schema sdcagg_schema;
typedef struct sdcagg_table sdcagg_table;
typedef struct sdcagg_result sdcagg_result;
typedef struct sdcagg_report sdcagg_report;

SDCAGG_API const char* sdcagg_version(void);
SDCAGG_API const char* sdcagg_last_error(void);
SDCAGG_API void sdcagg_string_free(char* s);

/* ---- schema ---------------------------------------------------------- */

SDCAGG_API sdcagg_status sdcagg_schema_load(const char* path, sdcagg_schema** out);
SDCAGG_API sdcagg_status sdcagg_schema_parse(const char* json, sdcagg_schema** out);
SDCAGG_API void sdcagg_schema_free(sdcagg_schema* schema);

/* ---- tables ---------------------------------------------------------- */

typedef struct sdcagg_load_options {
  int encode_categorical;        /* factorize string columns to codes */
  int allow_missing_identifiers; /* accept masked files without ids */
} sdcagg_load_options;

/* `options` may be NULL. */
SDCAGG_API sdcagg_status sdcagg_table_load(const char* path, const sdcagg_schema* schema,
                                           const sdcagg_load_options* options, sdcagg_table** out);
SDCAGG_API sdcagg_status sdcagg_table_parse(const char* csv, const sdcagg_schema* schema,
                                            const sdcagg_load_options* options, sdcagg_table** out);
/* Writes atomically (temporary file + rename). */
SDCAGG_API sdcagg_status sdcagg_table_save(const sdcagg_table* table, const char* path);
SDCAGG_API sdcagg_status sdcagg_table_to_csv(const sdcagg_table* table, char** out);
SDCAGG_API size_t sdcagg_table_rows(const sdcagg_table* table);
SDCAGG_API size_t sdcagg_table_cols(const sdcagg_table* table);
/* Row-major copy into `out`, which must hold rows*cols doubles. */
SDCAGG_API sdcagg_status sdcagg_table_values(const sdcagg_table* table, double* out, size_t capacity);
/* {"column": ["label for code 0", ...], ...}; "{}" when nothing was encoded. */
SDCAGG_API sdcagg_status sdcagg_table_codes_json(const sdcagg_table* table, char** out);
/* Per-column min/max/mean/std and roles as JSON. */
SDCAGG_API sdcagg_status sdcagg_table_inspect_json(const sdcagg_table* table, char** out);
SDCAGG_API void sdcagg_table_free(sdcagg_table* table);

/* ---- anonymization --------------------------------------------------- */

typedef struct sdcagg_anonymize_options {
  const char* method; /* mdav | individual_sorting | single_axis_zscore |
                         single_axis_pca | hm_pfsom */
  size_t k;
  size_t groups_count; /* hm_pfsom; 0 = unset */
  size_t c_min;        /* hm_pfsom; 0 = default */
  size_t c_max;        /* hm_pfsom; 0 = default */
  double m_fuzz;
  double eta;
  double tol;
  int max_iter;
  uint64_t seed;
  sdcagg_normalize normalize;
} sdcagg_anonymize_options;

SDCAGG_API void sdcagg_anonymize_options_init(sdcagg_anonymize_options* options);
SDCAGG_API sdcagg_status sdcagg_anonymize(const sdcagg_table* table, const sdcagg_anonymize_options* options,
                                          sdcagg_result** out);
/* New table handle holding the masked data (identifier columns dropped). */
SDCAGG_API sdcagg_status sdcagg_result_masked(const sdcagg_result* result, sdcagg_table** out);
/* Partition / sub-microdata structure JSON; "{}" for individual_sorting. */
SDCAGG_API sdcagg_status sdcagg_result_structure_json(const sdcagg_result* result, char** out);
/* Number of groups, or 0 when the method has no partition. */
SDCAGG_API size_t sdcagg_result_groups(const sdcagg_result* result);
/* Group label of every record; `out` must hold sdcagg_table_rows() entries. */
SDCAGG_API sdcagg_status sdcagg_result_labels(const sdcagg_result* result, size_t* out, size_t capacity);
SDCAGG_API void sdcagg_result_free(sdcagg_result* result);

/* ---- evaluation ------------------------------------------------------ */

/* k = 0 skips the k-anonymity verdict. */
SDCAGG_API sdcagg_status sdcagg_evaluate(const sdcagg_table* original, const sdcagg_table* masked, size_t k,
                                         sdcagg_report** out);
SDCAGG_API sdcagg_status sdcagg_report_json(const sdcagg_report* report, char** out);
SDCAGG_API sdcagg_status sdcagg_report_text(const sdcagg_report* report, char** out);
SDCAGG_API double sdcagg_report_il(const sdcagg_report* report);
SDCAGG_API size_t sdcagg_report_linked(const sdcagg_report* report);
SDCAGG_API size_t sdcagg_report_k_anonymous_at(const sdcagg_report* report);
SDCAGG_API void sdcagg_report_free(sdcagg_report* report);

/* k-anonymity of a masked table: smallest equivalence class size. */
SDCAGG_API sdcagg_status sdcagg_k_anonymity(const sdcagg_table* masked, size_t* k_max);

/* ---- sweeps ---------------------------------------------------------- */

typedef void (*sdcagg_progress_fn)(const char* line, void* user);

/* Runs the sweep described by the JSON spec file and writes its reports.
 * `written_json` (may be NULL) receives a JSON array of output paths.
 * Unknown methods or malformed specs yield SDCAGG_ERR_SPEC. */
SDCAGG_API sdcagg_status sdcagg_sweep_run(const char* spec_path, sdcagg_progress_fn progress, void* user,
                                          char** written_json);

/* ---- files ----------------------------------------------------------- */

SDCAGG_API sdcagg_status sdcagg_write_file(const char* path, const char* content);

#ifdef __cplusplus
}
#endif

#endif /* SDCAGG_SDCAGG_H_ */
