#ifndef CUSHLEPOR_H
#define CUSHLEPOR_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum ChlStatus {
  CHL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CHL_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  CHL_STATUS_INVALID_UTF8 = 2,
  /**
   * Bad parameters, preset name, scale, or configuration.
   */
  CHL_STATUS_USAGE = 3,
  /**
   * Malformed or degenerate input data.
   */
  CHL_STATUS_DATA = 4,
  /**
   * I/O or other environmental failure.
   */
  CHL_STATUS_RUNTIME = 5,
  /**
   * A caller-supplied buffer has the wrong length.
   */
  CHL_STATUS_BUFFER_SIZE = 6,
  /**
   * Internal panic; the library state is unchanged.
   */
  CHL_STATUS_PANIC = 7,
} ChlStatus;

typedef enum ChlTuner {
  CHL_TUNER_TPE = 0,
  CHL_TUNER_RANDOM = 1,
} ChlTuner;

/**
 * Opaque corpus handle.
 */
typedef struct ChlCorpus ChlCorpus;

typedef struct ChlParams {
  double alpha;
  double beta;
  uint32_t n;
  double weight_elp;
  double weight_pos;
  double weight_pr;
} ChlParams;

typedef struct ChlBreakdown {
  double lp;
  double npd;
  double npos_penal;
  double precision;
  double recall;
  double hpr;
  double score;
} ChlBreakdown;

typedef struct ChlTuneConfig {
  enum ChlTuner tuner;
  size_t budget;
  size_t n_startup;
  double gamma;
  size_t n_candidates;
  uint64_t seed;
  double prior_weight;
} ChlTuneConfig;

typedef struct ChlTuneResult {
  struct ChlParams params;
  /**
   * RMSE of the best trial.
   */
  double objective;
  size_t best_index;
  size_t trials;
} ChlTuneResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *chl_version(void);

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *chl_last_error_message(void);

/**
 * Looks up a built-in preset such as `en-de` or `zh-en:cushlepor_psqm`.
 *
 * # Safety
 * `name` must be null or a NUL-terminated string; `out` must be null or
 * valid for writes.
 */
enum ChlStatus chl_params_preset(const char *name, struct ChlParams *out);

/**
 * Scores one hypothesis against one reference.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `params` must be null or
 * valid for reads; `out` must be null or valid for writes.
 */
enum ChlStatus chl_hlepor(const char *hypothesis,
                          const char *reference,
                          const struct ChlParams *params,
                          struct ChlBreakdown *out);

/**
 * Loads a corpus file. `format` is `tsv`, `jsonl`, or null to infer it from
 * the extension. Every non-canonical column is read as a gold column. In
 * lenient mode (`strict == false`) invalid rows are skipped.
 *
 * # Safety
 * String arguments must be null or NUL-terminated; `out` must be null or
 * valid for writes. The handle written to `out` must be released with
 * `chl_corpus_free`.
 */
enum ChlStatus chl_corpus_load(const char *path,
                               const char *format,
                               bool strict,
                               struct ChlCorpus **out);

/**
 * Number of segments, or 0 for a null handle.
 *
 * # Safety
 * `corpus` must be null or a live handle from `chl_corpus_load`.
 */
size_t chl_corpus_len(const struct ChlCorpus *corpus);

/**
 * Writes one score per segment, in corpus order, into `scores`, which must
 * hold exactly `len` values.
 *
 * # Safety
 * `corpus` must be null or a live handle; `params` null or readable;
 * `scores` null or valid for `len` writes.
 */
enum ChlStatus chl_corpus_score(const struct ChlCorpus *corpus,
                                const struct ChlParams *params,
                                double *scores,
                                size_t len);

/**
 * RMSE and Pearson correlation against a gold column. `scale` is `psqm`,
 * `unit`, `MIN:MAX[:inverted]`, or null for `unit`. Pearson is NaN when
 * undefined.
 *
 * # Safety
 * `corpus` must be null or a live handle; strings null or NUL-terminated;
 * `params` null or readable; output pointers null or writable.
 */
enum ChlStatus chl_corpus_agreement(const struct ChlCorpus *corpus,
                                    const struct ChlParams *params,
                                    const char *gold_column,
                                    const char *scale_name,
                                    double *out_rmse,
                                    double *out_pearson);

/**
 * Default tuner settings.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum ChlStatus chl_tune_config_default(struct ChlTuneConfig *out);

/**
 * Tunes the parameters towards `gold_column` over the default search space.
 *
 * # Safety
 * `corpus` must be null or a live handle; strings null or NUL-terminated;
 * `config` null or readable; `out` null or writable.
 */
enum ChlStatus chl_tune(const struct ChlCorpus *corpus,
                        const char *gold_column,
                        const char *scale_name,
                        const struct ChlTuneConfig *config,
                        struct ChlTuneResult *out);

/**
 * Releases a corpus handle. Null is ignored.
 *
 * # Safety
 * `corpus` must be null or a handle from `chl_corpus_load` not yet freed.
 */
void chl_corpus_free(struct ChlCorpus *corpus);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUSHLEPOR_H */
