/* Copyright (c) 2026 the LCR authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the LCR confidence-reranking toolkit. All functions return
 * LCR_OK on success; on failure they return a status code and store a
 * thread-local message retrievable via lcr_last_error(). Handles are opaque
 * and must be released with their matching close function.
 */

#ifndef LCR_LCR_H
#define LCR_LCR_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lcr_status {
  LCR_OK = 0,
  LCR_ERROR_INVALID_ARGUMENT = 1,
  LCR_ERROR_NOT_FOUND = 2,
  LCR_ERROR_PARSE = 3,
  LCR_ERROR_IO = 4,
  LCR_ERROR_BACKEND = 5,
  LCR_ERROR_STATE = 6,
  LCR_ERROR_INTERNAL = 7
} lcr_status;

/* Library version as "major.minor.patch". */
const char* lcr_version(void);

/* Message describing the most recent failure on this thread ("" if none). */
const char* lcr_last_error(void);

/* ------------------------------------------------------------------ */
/* Pipeline: the six subcommands over one JSON configuration file.     */

typedef struct lcr_pipeline lcr_pipeline;

/* Opens a pipeline from a JSON config file. Relative paths inside the file
 * are resolved against its directory. */
lcr_status lcr_pipeline_open(const char* config_path, lcr_pipeline** out);
void lcr_pipeline_close(lcr_pipeline* pipeline);

/* Dotted-path config override (e.g. key "lcr.t_query", value "0.3").
 * Values parse as JSON when possible and fall back to plain strings. */
lcr_status lcr_pipeline_set_option(lcr_pipeline* pipeline, const char* key, const char* value);

lcr_status lcr_pipeline_index(lcr_pipeline* pipeline, int force);
lcr_status lcr_pipeline_retrieve(lcr_pipeline* pipeline, int k /* <= 0: config value */);
lcr_status lcr_pipeline_rerank(lcr_pipeline* pipeline,
                               const char* input_run_path /* NULL or "": config value */,
                               int fail_fast);
lcr_status lcr_pipeline_eval(lcr_pipeline* pipeline, const char* run_path,
                             const char* qrels_path, int k, int per_query);
lcr_status lcr_pipeline_sweep(lcr_pipeline* pipeline, const char* mode /* "qt" or "doc" */);
lcr_status lcr_pipeline_calibrate(lcr_pipeline* pipeline, const char* confidences_path,
                                  const char* qrels_path);

/* Human-readable report of the last successful command (owned by the
 * pipeline, valid until the next command or close). */
const char* lcr_pipeline_report(const lcr_pipeline* pipeline);

/* Per-query failures tolerated by the last rerank (0 when all succeeded). */
int lcr_pipeline_failed_queries(const lcr_pipeline* pipeline);

/* ------------------------------------------------------------------ */
/* Stateless scoring kernels.                                          */

/* Largest cluster proportion: max(sizes)/sum(sizes). */
lcr_status lcr_mscp(const int* cluster_sizes, int num_clusters, double* out);

/* Shannon entropy (natural log) over cluster proportions. */
lcr_status lcr_semantic_entropy(const int* cluster_sizes, int num_clusters, double* out);

/* +1 if confidence >= t_upper, -1 if confidence <= t_lower, else 0. */
lcr_status lcr_binned_confidence_score(double confidence, double t_upper, double t_lower,
                                       int* out_bin);

typedef struct lcr_sort_params {
  double t_query;
  double t_upper;
  double t_lower;
  int query_threshold_enabled; /* 0 disables the gate (always re-sort) */
} lcr_sort_params;

/* Binned multi-level sort over n candidates. Writes a permutation of
 * 0..n-1 into out_order (best first) and the gate decision into out_gated
 * (may be NULL). */
lcr_status lcr_sort(double query_confidence, const double* confidences,
                    const double* prev_scores, int n, const lcr_sort_params* params,
                    int* out_order, int* out_gated);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LCR_LCR_H */
