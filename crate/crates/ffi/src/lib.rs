//! C ABI for the `tadeval` evaluation library.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`TadStatus`]; out-parameters are
//!   written only when the return value is `TadStatus::Ok`.
//! * Score and label series are opaque handles ([`TadScores`], [`TadLabels`])
//!   created with `*_new` and released with `*_free`. Passing `NULL` to a
//!   `*_free` function is a no-op; any other use of a freed or `NULL` handle
//!   is rejected with [`TadStatus::NullPointer`].
//! * A human-readable description of the most recent failure on the calling
//!   thread is available from [`tadeval_last_error_message`]; the pointer
//!   stays valid until the next failing call on the same thread.
//! * Protocols are selected with the `TadProtocol` constants. Functions take
//!   the protocol as a plain `int32_t` so that out-of-range values coming
//!   from C are diagnosed (`TadStatus::InvalidArgument`) instead of being
//!   undefined behavior.
//!
//! The generated header lives at `include/tadeval.h` and is refreshed by the
//! build script on every build.

use std::cell::RefCell;
use std::ffi::CString;
use std::panic::{catch_unwind, AssertUnwindSafe};

use libc::{c_char, size_t};

use tadeval::{
    auroc_pairwise, default_delta_grid, default_k_grid, evaluate, expected_f1_pa_curve,
    expected_precision_pa, expected_recall_pa, k_sweep, roc_pr, sweep_best_f1, AnalyticParams,
    Error, LabelSeries, ProtocolConfig, ScoreSeries, ThresholdCandidates,
};

/// Result of every fallible call in this API.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TadStatus {
    /// The call succeeded and all out-parameters were written.
    Ok = 0,
    /// A required pointer argument was `NULL`.
    NullPointer = 1,
    /// An argument was out of range or otherwise malformed.
    InvalidArgument = 2,
    /// The input data failed validation (length mismatch, bad label, ...).
    DataError = 3,
    /// An internal invariant was violated; please report this.
    InternalError = 4,
}

/// Evaluation protocol selector. Pass one of these constants wherever a
/// function takes an `int32_t protocol` argument.
#[repr(i32)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TadProtocol {
    /// Point-wise evaluation: predictions are scored as-is.
    Point = 0,
    /// Point adjustment: one hit inside a labeled segment credits the whole
    /// segment.
    PointAdjust = 1,
    /// PA%K: a segment is credited only when the fraction of hits strictly
    /// exceeds `k_percent / 100`.
    PercentK = 2,
}

/// Confusion counts and derived metrics for one evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TadEvaluation {
    pub true_positives: u64,
    pub false_positives: u64,
    pub true_negatives: u64,
    pub false_negatives: u64,
    /// Precision in `[0, 1]`; `0` when no positives were predicted.
    pub precision: f64,
    /// Recall in `[0, 1]`; `0` when the labels contain no positives.
    pub recall: f64,
    /// Harmonic mean of precision and recall; `0` when undefined.
    pub f1: f64,
}

/// Best operating point found by a threshold sweep.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TadSweepBest {
    /// Threshold achieving the best F1 (lowest such threshold on ties).
    /// May be `-INFINITY`: the degenerate all-positive predictor.
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of candidate thresholds examined.
    pub num_thresholds: u64,
}

/// An opaque, validated series of real-valued anomaly scores.
pub struct TadScores(ScoreSeries);

/// An opaque, validated series of binary labels.
pub struct TadLabels(LabelSeries);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    // NUL bytes cannot occur in our error text, but never panic here.
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: TadStatus, message: &str) -> TadStatus {
    set_last_error(message);
    status
}

fn fail_with(err: &Error) -> TadStatus {
    let status = match err {
        Error::InvalidParam { .. } | Error::EmptyCandidates => TadStatus::InvalidArgument,
        _ => TadStatus::DataError,
    };
    fail(status, &err.to_string())
}

/// Run `body` with panics converted to `TadStatus::InternalError` so that
/// unwinding never crosses the C boundary.
fn guarded(body: impl FnOnce() -> TadStatus) -> TadStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(TadStatus::InternalError, "internal panic in tadeval"),
    }
}

fn protocol_config(protocol: i32, k_percent: f64) -> Result<ProtocolConfig, TadStatus> {
    match protocol {
        p if p == TadProtocol::Point as i32 => Ok(ProtocolConfig::point()),
        p if p == TadProtocol::PointAdjust as i32 => Ok(ProtocolConfig::point_adjust()),
        p if p == TadProtocol::PercentK as i32 => {
            ProtocolConfig::percent_k(k_percent).map_err(|err| fail_with(&err))
        }
        other => Err(fail(
            TadStatus::InvalidArgument,
            &format!("unknown protocol selector {other}"),
        )),
    }
}

/// `unsafe`: dereferences `handle`. Returns `Err` on `NULL`.
unsafe fn deref<'a, T>(handle: *const T, what: &str) -> Result<&'a T, TadStatus> {
    if handle.is_null() {
        return Err(fail(TadStatus::NullPointer, &format!("{what} is NULL")));
    }
    Ok(&*handle)
}

fn analytic_params(
    gamma: f64,
    segment_length: size_t,
    delta_prime: f64,
) -> Result<AnalyticParams, TadStatus> {
    AnalyticParams::new(gamma, segment_length, delta_prime).map_err(|err| fail_with(&err))
}

/// Create a score series from `len` doubles. Values must be finite.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be a valid
/// destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn tadeval_scores_new(
    values: *const f64,
    len: size_t,
    out: *mut *mut TadScores,
) -> TadStatus {
    guarded(|| {
        if values.is_null() || out.is_null() {
            return fail(TadStatus::NullPointer, "values/out is NULL");
        }
        let slice = std::slice::from_raw_parts(values, len);
        match ScoreSeries::new(slice.to_vec(), "scores") {
            Ok(series) => {
                *out = Box::into_raw(Box::new(TadScores(series)));
                TadStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Release a score series. `NULL` is ignored.
///
/// # Safety
/// `handle` must be a pointer returned by [`tadeval_scores_new`] that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn tadeval_scores_free(handle: *mut TadScores) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of points in a score series.
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tadeval_scores_len(
    handle: *const TadScores,
    out: *mut size_t,
) -> TadStatus {
    guarded(|| {
        let scores = match deref(handle, "scores handle") {
            Ok(s) => s,
            Err(status) => return status,
        };
        if out.is_null() {
            return fail(TadStatus::NullPointer, "out is NULL");
        }
        *out = scores.0.len();
        TadStatus::Ok
    })
}

/// Create a label series from `len` bytes. Values must be 0 or 1.
///
/// # Safety
/// `values` must point to `len` readable bytes and `out` must be a valid
/// destination for one pointer.
#[no_mangle]
pub unsafe extern "C" fn tadeval_labels_new(
    values: *const u8,
    len: size_t,
    out: *mut *mut TadLabels,
) -> TadStatus {
    guarded(|| {
        if values.is_null() || out.is_null() {
            return fail(TadStatus::NullPointer, "values/out is NULL");
        }
        let slice = std::slice::from_raw_parts(values, len);
        match LabelSeries::new(slice.to_vec()) {
            Ok(series) => {
                *out = Box::into_raw(Box::new(TadLabels(series)));
                TadStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Release a label series. `NULL` is ignored.
///
/// # Safety
/// `handle` must be a pointer returned by [`tadeval_labels_new`] that has not
/// been freed already.
#[no_mangle]
pub unsafe extern "C" fn tadeval_labels_free(handle: *mut TadLabels) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of points in a label series.
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tadeval_labels_len(
    handle: *const TadLabels,
    out: *mut size_t,
) -> TadStatus {
    guarded(|| {
        let labels = match deref(handle, "labels handle") {
            Ok(l) => l,
            Err(status) => return status,
        };
        if out.is_null() {
            return fail(TadStatus::NullPointer, "out is NULL");
        }
        *out = labels.0.len();
        TadStatus::Ok
    })
}

/// Evaluate `scores > delta` against `labels` under the chosen protocol.
///
/// `protocol` is one of the `TadProtocol` constants; `k_percent` is only
/// consulted for `TAD_PROTOCOL_PERCENT_K` and must then lie in `[0, 100]`.
///
/// # Safety
/// `scores` and `labels` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tadeval_evaluate(
    scores: *const TadScores,
    labels: *const TadLabels,
    delta: f64,
    protocol: i32,
    k_percent: f64,
    out: *mut TadEvaluation,
) -> TadStatus {
    guarded(|| {
        let (scores, labels) = match (deref(scores, "scores"), deref(labels, "labels")) {
            (Ok(s), Ok(l)) => (s, l),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        if out.is_null() {
            return fail(TadStatus::NullPointer, "out is NULL");
        }
        let config = match protocol_config(protocol, k_percent) {
            Ok(config) => config,
            Err(status) => return status,
        };
        match evaluate(&scores.0, &labels.0, delta, &config) {
            Ok(evaluation) => {
                *out = TadEvaluation {
                    true_positives: evaluation.counts.tp as u64,
                    false_positives: evaluation.counts.fp as u64,
                    true_negatives: evaluation.counts.tn as u64,
                    false_negatives: evaluation.counts.fn_ as u64,
                    precision: evaluation.metrics.precision,
                    recall: evaluation.metrics.recall,
                    f1: evaluation.metrics.f1,
                };
                TadStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Sweep every unique score value as a threshold (plus the all-positive
/// sentinel) and report the best-F1 operating point under the chosen
/// protocol. Ties resolve to the lowest threshold.
///
/// # Safety
/// `scores` and `labels` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tadeval_sweep_best_f1(
    scores: *const TadScores,
    labels: *const TadLabels,
    protocol: i32,
    k_percent: f64,
    out: *mut TadSweepBest,
) -> TadStatus {
    guarded(|| {
        let (scores, labels) = match (deref(scores, "scores"), deref(labels, "labels")) {
            (Ok(s), Ok(l)) => (s, l),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        if out.is_null() {
            return fail(TadStatus::NullPointer, "out is NULL");
        }
        let config = match protocol_config(protocol, k_percent) {
            Ok(config) => config,
            Err(status) => return status,
        };
        match sweep_best_f1(
            &scores.0,
            &labels.0,
            &config,
            &ThresholdCandidates::AllUniqueScores,
        ) {
            Ok(result) => {
                let best = result.best_metrics();
                *out = TadSweepBest {
                    threshold: result.best_threshold,
                    precision: best.precision,
                    recall: best.recall,
                    f1: best.f1,
                    num_thresholds: result.thresholds.len() as u64,
                };
                TadStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Area under the F1-vs-K curve at a fixed threshold `delta`, over the
/// default K grid `0, 10, ..., 100`, normalized to `[0, 1]`.
///
/// # Safety
/// `scores` and `labels` must be live handles; `out_auc` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tadeval_k_sweep_auc(
    scores: *const TadScores,
    labels: *const TadLabels,
    delta: f64,
    out_auc: *mut f64,
) -> TadStatus {
    guarded(|| {
        let (scores, labels) = match (deref(scores, "scores"), deref(labels, "labels")) {
            (Ok(s), Ok(l)) => (s, l),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        if out_auc.is_null() {
            return fail(TadStatus::NullPointer, "out_auc is NULL");
        }
        match k_sweep(&scores.0, &labels.0, delta, &default_k_grid()) {
            Ok(curve) => {
                *out_auc = curve.auc;
                TadStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Threshold-free ranking quality: AUROC (trapezoidal, equal to the
/// tie-corrected Mann-Whitney statistic) and AUPR.
///
/// Either output pointer may be `NULL` if that value is not wanted, but not
/// both.
///
/// # Safety
/// `scores` and `labels` must be live handles; non-`NULL` outputs must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tadeval_roc_auc(
    scores: *const TadScores,
    labels: *const TadLabels,
    out_auroc: *mut f64,
    out_aupr: *mut f64,
) -> TadStatus {
    guarded(|| {
        let (scores, labels) = match (deref(scores, "scores"), deref(labels, "labels")) {
            (Ok(s), Ok(l)) => (s, l),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        if out_auroc.is_null() && out_aupr.is_null() {
            return fail(TadStatus::NullPointer, "both outputs are NULL");
        }
        match roc_pr(&scores.0, &labels.0) {
            Ok(curves) => {
                if !out_auroc.is_null() {
                    *out_auroc = curves.auroc;
                }
                if !out_aupr.is_null() {
                    *out_aupr = curves.aupr;
                }
                TadStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Rank-based AUROC computed pairwise; agrees with the curve integral to
/// floating-point precision and is exposed for cross-checking.
///
/// # Safety
/// `scores` and `labels` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tadeval_auroc_pairwise(
    scores: *const TadScores,
    labels: *const TadLabels,
    out: *mut f64,
) -> TadStatus {
    guarded(|| {
        let (scores, labels) = match (deref(scores, "scores"), deref(labels, "labels")) {
            (Ok(s), Ok(l)) => (s, l),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        if out.is_null() {
            return fail(TadStatus::NullPointer, "out is NULL");
        }
        match auroc_pairwise(&scores.0, &labels.0) {
            Ok(value) => {
                *out = value;
                TadStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Closed-form expected recall under point adjustment for an i.i.d. detector
/// with per-point miss probability `delta_prime`, anomaly rate `gamma`, and
/// segment length `segment_length`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tadeval_expected_recall_pa(
    gamma: f64,
    segment_length: size_t,
    delta_prime: f64,
    out: *mut f64,
) -> TadStatus {
    guarded(|| {
        if out.is_null() {
            return fail(TadStatus::NullPointer, "out is NULL");
        }
        let params = match analytic_params(gamma, segment_length, delta_prime) {
            Ok(params) => params,
            Err(status) => return status,
        };
        *out = expected_recall_pa(&params);
        TadStatus::Ok
    })
}

/// Closed-form expected precision under point adjustment (Bayes-consistent
/// form). See [`tadeval_expected_recall_pa`] for the parameter model.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tadeval_expected_precision_pa(
    gamma: f64,
    segment_length: size_t,
    delta_prime: f64,
    out: *mut f64,
) -> TadStatus {
    guarded(|| {
        if out.is_null() {
            return fail(TadStatus::NullPointer, "out is NULL");
        }
        let params = match analytic_params(gamma, segment_length, delta_prime) {
            Ok(params) => params,
            Err(status) => return status,
        };
        *out = expected_precision_pa(&params);
        TadStatus::Ok
    })
}

/// Maximum of the closed-form expected F1 under point adjustment over a
/// dense grid of `delta_prime` values, with the grid point attaining it.
/// Either output may be `NULL` if not wanted, but not both.
///
/// # Safety
/// Non-`NULL` outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn tadeval_expected_max_f1_pa(
    gamma: f64,
    segment_length: size_t,
    out_max_f1: *mut f64,
    out_argmax_delta: *mut f64,
) -> TadStatus {
    guarded(|| {
        if out_max_f1.is_null() && out_argmax_delta.is_null() {
            return fail(TadStatus::NullPointer, "both outputs are NULL");
        }
        match expected_f1_pa_curve(gamma, segment_length, &default_delta_grid()) {
            Ok(curve) => {
                if !out_max_f1.is_null() {
                    *out_max_f1 = curve.max_f1;
                }
                if !out_argmax_delta.is_null() {
                    *out_argmax_delta = curve.argmax_delta;
                }
                TadStatus::Ok
            }
            Err(err) => fail_with(&err),
        }
    })
}

/// Message describing the most recent failure on the calling thread, or an
/// empty string if none has occurred. The pointer stays valid until the next
/// failing call on the same thread; copy it if you need to keep it.
#[no_mangle]
pub extern "C" fn tadeval_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tadeval_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
