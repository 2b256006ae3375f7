//! Fundamental series types: multivariate signals, binary labels, anomaly
//! scores, and thresholded predictions.
//!
//! All constructors validate their invariants once; downstream code relies on
//! them without re-checking.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::protocol::Protocol;

/// A multivariate time series: `len()` time steps by `channels()` channels,
/// row-major, every value finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Array2<f64>,
    channel_names: Option<Vec<String>>,
}

impl TimeSeries {
    pub fn new(values: Array2<f64>, channel_names: Option<Vec<String>>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Empty("time series"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "time series",
                index: pos,
            });
        }
        if let Some(names) = &channel_names {
            if names.len() != values.ncols() {
                return Err(Error::ChannelMismatch {
                    left: names.len(),
                    right: values.ncols(),
                });
            }
        }
        Ok(Self {
            values,
            channel_names,
        })
    }

    /// Build from a flat row-major buffer of `rows * channels` values.
    pub fn from_rows(rows: usize, channels: usize, flat: Vec<f64>) -> Result<Self> {
        let values = Array2::from_shape_vec((rows, channels), flat)
            .map_err(|e| Error::invalid_param("values", e.to_string()))?;
        Self::new(values, None)
    }

    /// Number of time steps.
    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.values.nrows() == 0
    }

    /// Number of channels.
    pub fn channels(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn channel_names(&self) -> Option<&[String]> {
        self.channel_names.as_deref()
    }
}

/// Per-step ground-truth labels, each exactly 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSeries {
    labels: Vec<u8>,
}

impl LabelSeries {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Empty("label series"));
        }
        if let Some(idx) = labels.iter().position(|&v| v > 1) {
            return Err(Error::InvalidLabel {
                index: idx,
                value: f64::from(labels[idx]),
            });
        }
        Ok(Self { labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.labels
    }

    /// Number of steps labeled anomalous.
    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&v| v == 1).count()
    }
}

/// Per-step anomaly scores with a provenance tag (e.g. `"case1"`, a file path).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSeries {
    scores: Vec<f64>,
    origin: String,
}

impl ScoreSeries {
    pub fn new(scores: Vec<f64>, origin: impl Into<String>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::Empty("score series"));
        }
        if let Some(idx) = scores.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "score series",
                index: idx,
            });
        }
        Ok(Self {
            scores,
            origin: origin.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.scores
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }
}

/// Thresholded (and possibly protocol-adjusted) predictions, each 0 or 1,
/// tagged with the labeling rule that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSeries {
    predictions: Vec<u8>,
    protocol: Protocol,
}

impl PredictionSeries {
    pub fn new(predictions: Vec<u8>, protocol: Protocol) -> Result<Self> {
        if predictions.is_empty() {
            return Err(Error::Empty("prediction series"));
        }
        if let Some(idx) = predictions.iter().position(|&v| v > 1) {
            return Err(Error::InvalidLabel {
                index: idx,
                value: f64::from(predictions[idx]),
            });
        }
        Ok(Self {
            predictions,
            protocol,
        })
    }

    pub fn len(&self) -> usize {
        self.predictions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predictions.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.predictions
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn time_series_rejects_non_finite() {
        let err = TimeSeries::new(array![[1.0, f64::NAN]], None).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn time_series_rejects_name_mismatch() {
        let err = TimeSeries::new(array![[1.0, 2.0]], Some(vec!["a".into()])).unwrap_err();
        assert!(matches!(err, Error::ChannelMismatch { left: 1, right: 2 }));
    }

    #[test]
    fn labels_must_be_binary() {
        assert!(LabelSeries::new(vec![0, 1, 1]).is_ok());
        let err = LabelSeries::new(vec![0, 2]).unwrap_err();
        assert!(matches!(err, Error::InvalidLabel { index: 1, .. }));
    }

    #[test]
    fn empty_series_rejected() {
        assert!(matches!(
            ScoreSeries::new(vec![], "x").unwrap_err(),
            Error::Empty(_)
        ));
        assert!(matches!(
            LabelSeries::new(vec![]).unwrap_err(),
            Error::Empty(_)
        ));
    }
}
