//! Confusion counts and precision/recall/F1, plus score thresholding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::Protocol;
use crate::series::{LabelSeries, PredictionSeries, ScoreSeries};

/// Integer confusion-matrix counts for binary predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

/// Precision, recall, and F1, each in `[0, 1]`. Undefined ratios (0/0) are
/// reported as 0 so that degenerate thresholds sort below any real detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsTriple {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Threshold scores into binary predictions with the strict rule
/// `predict 1 iff score > delta`. Ties with the threshold are negatives.
///
/// `delta` may be any non-NaN value; `-inf` is the sentinel that marks every
/// step positive (used as the extra sweep candidate), and `+inf` marks every
/// step negative.
pub fn threshold_predictions(scores: &ScoreSeries, delta: f64) -> Result<PredictionSeries> {
    if delta.is_nan() {
        return Err(Error::invalid_param("delta", "must not be NaN"));
    }
    let predictions = scores
        .as_slice()
        .iter()
        .map(|&s| u8::from(s > delta))
        .collect();
    PredictionSeries::new(predictions, Protocol::Point)
}

/// Tally confusion counts between predictions and labels of equal length.
pub fn confusion(predictions: &PredictionSeries, labels: &LabelSeries) -> Result<ConfusionCounts> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: labels.len(),
        });
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &y) in predictions.as_slice().iter().zip(labels.as_slice()) {
        match (p, y) {
            (1, 1) => counts.tp += 1,
            (1, 0) => counts.fp += 1,
            (0, 0) => counts.tn += 1,
            (0, 1) => counts.fn_ += 1,
            _ => unreachable!("series constructors enforce binary values"),
        }
    }
    Ok(counts)
}

/// Precision, recall, and F1 from confusion counts, with 0/0 mapped to 0.
pub fn prf1(counts: ConfusionCounts) -> MetricsTriple {
    let precision = ratio_or_zero(counts.tp, counts.tp + counts.fp);
    let recall = ratio_or_zero(counts.tp, counts.tp + counts.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    MetricsTriple {
        precision,
        recall,
        f1,
    }
}

fn ratio_or_zero(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}
