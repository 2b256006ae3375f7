//! Scoring protocols: point-wise, point-adjusted (PA), and PA%K.
//!
//! Point adjustment rewrites raw predictions against ground-truth segments:
//! if a segment is "detected", every step of that segment is credited as a
//! true positive. The protocols differ only in what counts as detected:
//!
//! * `PointAdjust`: at least one predicted step inside the segment.
//! * `PointAdjustPercentK`: strictly more than K percent of the segment's
//!   steps predicted. `K = 0` reduces to plain PA and `K = 100` leaves the
//!   predictions untouched (a fraction can never exceed 1), recovering the
//!   point-wise metric.
//!
//! Predictions outside ground-truth segments are never modified, so false
//! positives survive adjustment unchanged.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{confusion, prf1, threshold_predictions, ConfusionCounts, MetricsTriple};
use crate::segment::SegmentSet;
use crate::series::{LabelSeries, PredictionSeries, ScoreSeries};

/// The labeling rule a prediction series was produced under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Protocol {
    /// Raw thresholded predictions, no adjustment.
    Point,
    /// Point adjustment: one hit detects the whole segment.
    PointAdjust,
    /// PA%K: a segment is detected only if more than K percent of it is hit.
    PointAdjustPercentK,
}

/// A protocol together with its K parameter (meaningful only for PA%K).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub protocol: Protocol,
    /// Detection quota in percent, in `[0, 100]`. Ignored unless the protocol
    /// is `PointAdjustPercentK`.
    pub k_percent: f64,
}

impl ProtocolConfig {
    pub fn point() -> Self {
        Self {
            protocol: Protocol::Point,
            k_percent: 0.0,
        }
    }

    pub fn point_adjust() -> Self {
        Self {
            protocol: Protocol::PointAdjust,
            k_percent: 0.0,
        }
    }

    pub fn percent_k(k_percent: f64) -> Result<Self> {
        validate_k(k_percent)?;
        Ok(Self {
            protocol: Protocol::PointAdjustPercentK,
            k_percent,
        })
    }
}

fn validate_k(k_percent: f64) -> Result<()> {
    if !k_percent.is_finite() || !(0.0..=100.0).contains(&k_percent) {
        return Err(Error::invalid_param("k_percent", "must be in [0, 100]"));
    }
    Ok(())
}

fn check_len(predictions: &PredictionSeries, segments: &SegmentSet) -> Result<()> {
    if predictions.len() != segments.total_length() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: segments.total_length(),
        });
    }
    Ok(())
}

/// Point-adjust predictions: fill every segment containing at least one
/// predicted step.
pub fn adjust_pa(
    predictions: &PredictionSeries,
    segments: &SegmentSet,
) -> Result<PredictionSeries> {
    check_len(predictions, segments)?;
    let mut out = predictions.as_slice().to_vec();
    for seg in segments.segments() {
        if out[seg.start..seg.end].contains(&1) {
            out[seg.start..seg.end].fill(1);
        }
    }
    PredictionSeries::new(out, Protocol::PointAdjust)
}

/// PA%K adjustment: fill a segment only when its detected fraction strictly
/// exceeds `k_percent / 100`.
pub fn adjust_pa_percent_k(
    predictions: &PredictionSeries,
    segments: &SegmentSet,
    k_percent: f64,
) -> Result<PredictionSeries> {
    check_len(predictions, segments)?;
    validate_k(k_percent)?;
    let mut out = predictions.as_slice().to_vec();
    for seg in segments.segments() {
        let hits = out[seg.start..seg.end].iter().filter(|&&p| p == 1).count();
        if percent_k_fires(hits, seg.len(), k_percent) {
            out[seg.start..seg.end].fill(1);
        }
    }
    PredictionSeries::new(out, Protocol::PointAdjustPercentK)
}

/// The PA%K detection test for one segment: `hits / len > k_percent / 100`,
/// evaluated with the exact floating-point comparison used everywhere in this
/// crate so that all code paths agree bit-for-bit.
pub(crate) fn percent_k_fires(hits: usize, len: usize, k_percent: f64) -> bool {
    hits as f64 / len as f64 > k_percent / 100.0
}

/// Apply a protocol's adjustment to raw predictions.
pub fn adjust(
    predictions: &PredictionSeries,
    segments: &SegmentSet,
    config: &ProtocolConfig,
) -> Result<PredictionSeries> {
    match config.protocol {
        Protocol::Point => {
            check_len(predictions, segments)?;
            Ok(predictions.clone())
        }
        Protocol::PointAdjust => adjust_pa(predictions, segments),
        Protocol::PointAdjustPercentK => {
            adjust_pa_percent_k(predictions, segments, config.k_percent)
        }
    }
}

/// The outcome of scoring one threshold under one protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub config: ProtocolConfig,
    pub threshold: f64,
    pub counts: ConfusionCounts,
    pub metrics: MetricsTriple,
}

/// Threshold `scores` at `delta`, adjust under `config`, and score against
/// `labels`.
pub fn evaluate(
    scores: &ScoreSeries,
    labels: &LabelSeries,
    delta: f64,
    config: &ProtocolConfig,
) -> Result<Evaluation> {
    let segments = SegmentSet::from_labels(labels);
    evaluate_with_segments(scores, labels, &segments, delta, config)
}

/// Like [`evaluate`] but reusing a pre-extracted segment set (the segments
/// must describe `labels`). Sweeps call this to avoid re-extracting segments
/// per threshold.
pub fn evaluate_with_segments(
    scores: &ScoreSeries,
    labels: &LabelSeries,
    segments: &SegmentSet,
    delta: f64,
    config: &ProtocolConfig,
) -> Result<Evaluation> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let raw = threshold_predictions(scores, delta)?;
    let adjusted = adjust(&raw, segments, config)?;
    let counts = confusion(&adjusted, labels)?;
    Ok(Evaluation {
        config: *config,
        threshold: delta,
        counts,
        metrics: prf1(counts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn preds(bits: &[u8]) -> PredictionSeries {
        PredictionSeries::new(bits.to_vec(), Protocol::Point).unwrap()
    }

    fn labels(bits: &[u8]) -> LabelSeries {
        LabelSeries::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn pa_fills_detected_segment() {
        let y = labels(&[0, 1, 1, 1, 0]);
        let segs = SegmentSet::from_labels(&y);
        let adjusted = adjust_pa(&preds(&[0, 0, 1, 0, 0]), &segs).unwrap();
        assert_eq!(adjusted.as_slice(), &[0, 1, 1, 1, 0]);
    }

    #[test]
    fn pa_leaves_undetected_segment_and_outside_steps_alone() {
        let y = labels(&[0, 1, 1, 0, 1, 1, 0]);
        let segs = SegmentSet::from_labels(&y);
        let raw = preds(&[1, 0, 0, 1, 0, 1, 0]);
        let adjusted = adjust_pa(&raw, &segs).unwrap();
        // First segment [1,3) undetected, second [4,6) filled; the two false
        // positives at steps 0 and 3 survive untouched.
        assert_eq!(adjusted.as_slice(), &[1, 0, 0, 1, 1, 1, 0]);
    }

    #[test]
    fn percent_k_threshold_is_strict() {
        let y = labels(&[0, 1, 1, 1, 1, 0]);
        let segs = SegmentSet::from_labels(&y);
        let raw = preds(&[0, 0, 1, 0, 0, 0]); // 1 of 4 = 25% detected
        let at_20 = adjust_pa_percent_k(&raw, &segs, 20.0).unwrap();
        assert_eq!(at_20.as_slice(), &[0, 1, 1, 1, 1, 0]);
        let at_25 = adjust_pa_percent_k(&raw, &segs, 25.0).unwrap();
        assert_eq!(at_25.as_slice(), raw.as_slice());
        let at_30 = adjust_pa_percent_k(&raw, &segs, 30.0).unwrap();
        assert_eq!(at_30.as_slice(), raw.as_slice());
    }

    #[test]
    fn percent_k_endpoints_match_pa_and_point() {
        let y = labels(&[0, 1, 1, 1, 1, 0, 1, 1, 0]);
        let segs = SegmentSet::from_labels(&y);
        let raw = preds(&[1, 0, 1, 0, 0, 0, 0, 0, 1]);
        let k0 = adjust_pa_percent_k(&raw, &segs, 0.0).unwrap();
        let pa = adjust_pa(&raw, &segs).unwrap();
        assert_eq!(k0.as_slice(), pa.as_slice());
        let k100 = adjust_pa_percent_k(&raw, &segs, 100.0).unwrap();
        assert_eq!(k100.as_slice(), raw.as_slice());
    }

    #[test]
    fn evaluate_point_vs_pa_on_known_example() {
        let scores = ScoreSeries::new(vec![0.1, 0.2, 0.9, 0.2, 0.1], "t").unwrap();
        let y = labels(&[0, 1, 1, 1, 0]);
        let point = evaluate(&scores, &y, 0.5, &ProtocolConfig::point()).unwrap();
        assert_eq!(point.counts.tp, 1);
        assert_eq!(point.counts.fn_, 2);
        assert!((point.metrics.f1 - 0.5).abs() < 1e-15);
        let pa = evaluate(&scores, &y, 0.5, &ProtocolConfig::point_adjust()).unwrap();
        assert_eq!(pa.counts.tp, 3);
        assert_eq!(pa.counts.fn_, 0);
        assert!((pa.metrics.f1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evaluate_rejects_mismatched_lengths() {
        let scores = ScoreSeries::new(vec![0.1, 0.2], "t").unwrap();
        let y = labels(&[0, 1, 1]);
        assert!(evaluate(&scores, &y, 0.5, &ProtocolConfig::point()).is_err());
    }

    #[test]
    fn invalid_k_rejected() {
        assert!(ProtocolConfig::percent_k(-1.0).is_err());
        assert!(ProtocolConfig::percent_k(100.5).is_err());
        assert!(ProtocolConfig::percent_k(f64::NAN).is_err());
        assert!(ProtocolConfig::percent_k(0.0).is_ok());
        assert!(ProtocolConfig::percent_k(100.0).is_ok());
    }
}
