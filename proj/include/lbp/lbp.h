/* Copyright 2026 The lbplab Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the lbplab library. Every function returns an lbp_status;
 * on failure lbp_last_error() describes the problem for the calling thread.
 * Objects are opaque handles released with their matching *_free function.
 * Strings returned through `char**` are owned by the caller and released
 * with lbp_string_free.
 */
#ifndef LBP_LBP_H_
#define LBP_LBP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LBP_BUILDING_LIBRARY)
#    define LBP_API __declspec(dllexport)
#  else
#    define LBP_API __declspec(dllimport)
#  endif
#else
#  define LBP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lbp_status {
  LBP_OK = 0,
  LBP_ERR_INVALID_ARGUMENT = 1,
  LBP_ERR_DIMENSION_MISMATCH = 2,
  LBP_ERR_OUT_OF_RANGE = 3,
  LBP_ERR_NON_FINITE = 4,
  LBP_ERR_INFEASIBLE = 5,
  LBP_ERR_IO = 6,
  LBP_ERR_FORMAT = 7,
  LBP_ERR_INVARIANT = 8,
  LBP_ERR_INTERNAL = 9
} lbp_status;

typedef struct lbp_config lbp_config;
typedef struct lbp_dataset lbp_dataset;
typedef struct lbp_checkpoint lbp_checkpoint;

LBP_API const char* lbp_version(void);
LBP_API const char* lbp_status_string(lbp_status status);
/* Message of the last failed call on this thread; "" after a success. */
LBP_API const char* lbp_last_error(void);
LBP_API void lbp_string_free(char* s);

/* ---- configuration ---- */

LBP_API lbp_status lbp_config_default(lbp_config** out);
LBP_API lbp_status lbp_config_parse(const char* text, lbp_config** out);
LBP_API lbp_status lbp_config_load(const char* path, lbp_config** out);
/* "section.key=value"; value is JSON, bare words are taken as strings. */
LBP_API lbp_status lbp_config_override(lbp_config* config, const char* assignment);
/* Sets the scenario, training, ablation and gradcheck seeds at once. */
LBP_API lbp_status lbp_config_set_seed(lbp_config* config, uint64_t seed);
LBP_API lbp_status lbp_config_render(const lbp_config* config, char** out);
LBP_API lbp_status lbp_config_hash(const lbp_config* config, uint64_t* out);
LBP_API void lbp_config_free(lbp_config* config);

/* ---- datasets ---- */

LBP_API lbp_status lbp_scenario_generate(const lbp_config* config, lbp_dataset** train,
                                         lbp_dataset** infer);
LBP_API lbp_status lbp_dataset_load(const char* path, lbp_dataset** out);
LBP_API lbp_status lbp_dataset_save(const lbp_dataset* dataset, const char* path);
LBP_API lbp_status lbp_dataset_render(const lbp_dataset* dataset, char** out);
/* Writes "train" or "infer" (caller frees). */
LBP_API lbp_status lbp_dataset_split(const lbp_dataset* dataset, char** out);
LBP_API lbp_status lbp_dataset_proposal_count(const lbp_dataset* dataset, size_t* out);
LBP_API void lbp_dataset_free(lbp_dataset* dataset);

/* ---- discovery and training ---- */

/* Category-count estimate over the filtered background proposals. Either
 * output may be NULL. */
LBP_API lbp_status lbp_estimate_k(const lbp_config* config, const lbp_dataset* train,
                                  size_t* k, char** json, char** text);
/* `history` (may be NULL) receives one JSON record per step. */
LBP_API lbp_status lbp_train(const lbp_config* config, const lbp_dataset* train,
                             lbp_checkpoint** out, char** history);
LBP_API lbp_status lbp_checkpoint_load(const char* path, lbp_checkpoint** out);
LBP_API lbp_status lbp_checkpoint_save(const lbp_checkpoint* checkpoint, const char* path);
LBP_API lbp_status lbp_checkpoint_render(const lbp_checkpoint* checkpoint, char** out);
LBP_API lbp_status lbp_checkpoint_losses(const lbp_checkpoint* checkpoint, double* initial,
                                         double* final_loss);
LBP_API void lbp_checkpoint_free(lbp_checkpoint* checkpoint);

/* ---- evaluation and reports ---- */

/* rectify: 0 off, 1 on, -1 take eval.rectify from the config. Outputs may be NULL. */
LBP_API lbp_status lbp_evaluate(const lbp_config* config, const lbp_checkpoint* checkpoint,
                                const lbp_dataset* infer, int rectify, double* novel_top1,
                                char** json, char** text);
LBP_API lbp_status lbp_rectify_report(const lbp_checkpoint* checkpoint, const lbp_dataset* infer,
                                      size_t max_proposals, char** json, char** text);
LBP_API lbp_status lbp_ablate(const lbp_config* config, char** json, char** text);
/* all_pass receives 1 when every non-straddling row is within tolerance. */
LBP_API lbp_status lbp_gradcheck(const lbp_config* config, int* all_pass, char** json, char** text);

/* Writes each (name, content) pair into `dir` plus a manifest.json. */
LBP_API lbp_status lbp_write_report_dir(const char* dir, const char* command,
                                        const char* const* names, const char* const* contents,
                                        size_t count, uint64_t config_hash);

/* ---- primitives ---- */

LBP_API lbp_status lbp_cosine(const double* a, const double* b, size_t dim, double* out);
/* p(c | w) over n embeddings stored row-major in `embeddings` (n x dim). */
LBP_API lbp_status lbp_softmax_probs(const double* w, const double* embeddings, size_t n, size_t dim,
                                     double tau, double* out);

#ifdef __cplusplus
}
#endif

#endif /* LBP_LBP_H_ */
