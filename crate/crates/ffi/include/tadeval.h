/* tadeval C API.
 *
 * Generated by the tadeval-ffi build script; do not edit by hand.
 */

#ifndef TADEVAL_H
#define TADEVAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call in this API.
 */
typedef enum TadStatus {
  /**
   * The call succeeded and all out-parameters were written.
   */
  TAD_STATUS_OK = 0,
  /**
   * A required pointer argument was `NULL`.
   */
  TAD_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range or otherwise malformed.
   */
  TAD_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The input data failed validation (length mismatch, bad label, ...).
   */
  TAD_STATUS_DATA_ERROR = 3,
  /**
   * An internal invariant was violated; please report this.
   */
  TAD_STATUS_INTERNAL_ERROR = 4,
} TadStatus;

/**
 * Evaluation protocol selector. Pass one of these constants wherever a
 * function takes an `int32_t protocol` argument.
 */
enum TadProtocol
#if defined(__cplusplus) || __STDC_VERSION__ >= 202311L
  : int32_t
#endif // defined(__cplusplus) || __STDC_VERSION__ >= 202311L
 {
  /**
   * Point-wise evaluation: predictions are scored as-is.
   */
  TAD_PROTOCOL_POINT = 0,
  /**
   * Point adjustment: one hit inside a labeled segment credits the whole
   * segment.
   */
  TAD_PROTOCOL_POINT_ADJUST = 1,
  /**
   * PA%K: a segment is credited only when the fraction of hits strictly
   * exceeds `k_percent / 100`.
   */
  TAD_PROTOCOL_PERCENT_K = 2,
};
#ifndef __cplusplus
#if __STDC_VERSION__ >= 202311L
typedef enum TadProtocol TadProtocol;
#else
typedef int32_t TadProtocol;
#endif // __STDC_VERSION__ >= 202311L
#endif // __cplusplus

/**
 * An opaque, validated series of binary labels.
 */
typedef struct TadLabels TadLabels;

/**
 * An opaque, validated series of real-valued anomaly scores.
 */
typedef struct TadScores TadScores;

/**
 * Confusion counts and derived metrics for one evaluation.
 */
typedef struct TadEvaluation {
  uint64_t true_positives;
  uint64_t false_positives;
  uint64_t true_negatives;
  uint64_t false_negatives;
  /**
   * Precision in `[0, 1]`; `0` when no positives were predicted.
   */
  double precision;
  /**
   * Recall in `[0, 1]`; `0` when the labels contain no positives.
   */
  double recall;
  /**
   * Harmonic mean of precision and recall; `0` when undefined.
   */
  double f1;
} TadEvaluation;

/**
 * Best operating point found by a threshold sweep.
 */
typedef struct TadSweepBest {
  /**
   * Threshold achieving the best F1 (lowest such threshold on ties).
   * May be `-INFINITY`: the degenerate all-positive predictor.
   */
  double threshold;
  double precision;
  double recall;
  double f1;
  /**
   * Number of candidate thresholds examined.
   */
  uint64_t num_thresholds;
} TadSweepBest;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create a score series from `len` doubles. Values must be finite.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` must be a valid
 * destination for one pointer.
 */
enum TadStatus tadeval_scores_new(const double *values, size_t len, struct TadScores **out);

/**
 * Release a score series. `NULL` is ignored.
 *
 * # Safety
 * `handle` must be a pointer returned by [`tadeval_scores_new`] that has not
 * been freed already.
 */
void tadeval_scores_free(struct TadScores *handle);

/**
 * Number of points in a score series.
 *
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum TadStatus tadeval_scores_len(const struct TadScores *handle, size_t *out);

/**
 * Create a label series from `len` bytes. Values must be 0 or 1.
 *
 * # Safety
 * `values` must point to `len` readable bytes and `out` must be a valid
 * destination for one pointer.
 */
enum TadStatus tadeval_labels_new(const uint8_t *values, size_t len, struct TadLabels **out);

/**
 * Release a label series. `NULL` is ignored.
 *
 * # Safety
 * `handle` must be a pointer returned by [`tadeval_labels_new`] that has not
 * been freed already.
 */
void tadeval_labels_free(struct TadLabels *handle);

/**
 * Number of points in a label series.
 *
 * # Safety
 * `handle` must be live; `out` must be writable.
 */
enum TadStatus tadeval_labels_len(const struct TadLabels *handle, size_t *out);

/**
 * Evaluate `scores > delta` against `labels` under the chosen protocol.
 *
 * `protocol` is one of the `TadProtocol` constants; `k_percent` is only
 * consulted for `TAD_PROTOCOL_PERCENT_K` and must then lie in `[0, 100]`.
 *
 * # Safety
 * `scores` and `labels` must be live handles; `out` must be writable.
 */
enum TadStatus tadeval_evaluate(const struct TadScores *scores,
                                const struct TadLabels *labels,
                                double delta,
                                int32_t protocol,
                                double k_percent,
                                struct TadEvaluation *out);

/**
 * Sweep every unique score value as a threshold (plus the all-positive
 * sentinel) and report the best-F1 operating point under the chosen
 * protocol. Ties resolve to the lowest threshold.
 *
 * # Safety
 * `scores` and `labels` must be live handles; `out` must be writable.
 */
enum TadStatus tadeval_sweep_best_f1(const struct TadScores *scores,
                                     const struct TadLabels *labels,
                                     int32_t protocol,
                                     double k_percent,
                                     struct TadSweepBest *out);

/**
 * Area under the F1-vs-K curve at a fixed threshold `delta`, over the
 * default K grid `0, 10, ..., 100`, normalized to `[0, 1]`.
 *
 * # Safety
 * `scores` and `labels` must be live handles; `out_auc` must be writable.
 */
enum TadStatus tadeval_k_sweep_auc(const struct TadScores *scores,
                                   const struct TadLabels *labels,
                                   double delta,
                                   double *out_auc);

/**
 * Threshold-free ranking quality: AUROC (trapezoidal, equal to the
 * tie-corrected Mann-Whitney statistic) and AUPR.
 *
 * Either output pointer may be `NULL` if that value is not wanted, but not
 * both.
 *
 * # Safety
 * `scores` and `labels` must be live handles; non-`NULL` outputs must be
 * writable.
 */
enum TadStatus tadeval_roc_auc(const struct TadScores *scores,
                               const struct TadLabels *labels,
                               double *out_auroc,
                               double *out_aupr);

/**
 * Rank-based AUROC computed pairwise; agrees with the curve integral to
 * floating-point precision and is exposed for cross-checking.
 *
 * # Safety
 * `scores` and `labels` must be live handles; `out` must be writable.
 */
enum TadStatus tadeval_auroc_pairwise(const struct TadScores *scores,
                                      const struct TadLabels *labels,
                                      double *out);

/**
 * Closed-form expected recall under point adjustment for an i.i.d. detector
 * with per-point miss probability `delta_prime`, anomaly rate `gamma`, and
 * segment length `segment_length`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TadStatus tadeval_expected_recall_pa(double gamma,
                                          size_t segment_length,
                                          double delta_prime,
                                          double *out);

/**
 * Closed-form expected precision under point adjustment (Bayes-consistent
 * form). See [`tadeval_expected_recall_pa`] for the parameter model.
 *
 * # Safety
 * `out` must be writable.
 */
enum TadStatus tadeval_expected_precision_pa(double gamma,
                                             size_t segment_length,
                                             double delta_prime,
                                             double *out);

/**
 * Maximum of the closed-form expected F1 under point adjustment over a
 * dense grid of `delta_prime` values, with the grid point attaining it.
 * Either output may be `NULL` if not wanted, but not both.
 *
 * # Safety
 * Non-`NULL` outputs must be writable.
 */
enum TadStatus tadeval_expected_max_f1_pa(double gamma,
                                          size_t segment_length,
                                          double *out_max_f1,
                                          double *out_argmax_delta);

/**
 * Message describing the most recent failure on the calling thread, or an
 * empty string if none has occurred. The pointer stays valid until the next
 * failing call on the same thread; copy it if you need to keep it.
 */
const char *tadeval_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tadeval_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TADEVAL_H */
