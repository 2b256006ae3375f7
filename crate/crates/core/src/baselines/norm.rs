//! Per-channel normalization fitted on a reference (training) series and
//! applied to another series without clamping.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Normalization method. Parameters are always learned from the reference
/// series, never from the series being transformed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormMethod {
    /// `(x - min_ref) / (max_ref - min_ref)`; constant channels map to 0.
    MinMax,
    /// `(x - mean_ref) / std_ref`; zero-variance channels map to 0.
    ZScore,
    /// Identity.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationSpec {
    pub method: NormMethod,
}

impl NormalizationSpec {
    pub fn minmax() -> Self {
        Self {
            method: NormMethod::MinMax,
        }
    }

    pub fn zscore() -> Self {
        Self {
            method: NormMethod::ZScore,
        }
    }

    pub fn none() -> Self {
        Self {
            method: NormMethod::None,
        }
    }
}

impl Default for NormalizationSpec {
    fn default() -> Self {
        Self::minmax()
    }
}

/// Per-channel affine transform `(x - shift) / scale`, with `scale == 0`
/// marking a degenerate channel that maps to 0.
struct ChannelParams {
    shift: f64,
    scale: f64,
}

fn fit(reference: &TimeSeries, method: NormMethod) -> Vec<ChannelParams> {
    let values = reference.values();
    let rows = values.nrows() as f64;
    (0..values.ncols())
        .map(|ch| {
            let column = values.column(ch);
            match method {
                NormMethod::None => ChannelParams {
                    shift: 0.0,
                    scale: 1.0,
                },
                NormMethod::MinMax => {
                    let min = column.iter().copied().fold(f64::INFINITY, f64::min);
                    let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    ChannelParams {
                        shift: min,
                        scale: max - min,
                    }
                }
                NormMethod::ZScore => {
                    let mean = column.sum() / rows;
                    let var = column.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / rows;
                    ChannelParams {
                        shift: mean,
                        scale: var.sqrt(),
                    }
                }
            }
        })
        .collect()
}

/// Normalize `series` using parameters fitted on `reference`. Out-of-range
/// values pass through unclamped; channels that are constant in the reference
/// become all zeros.
pub fn normalize(
    series: &TimeSeries,
    reference: &TimeSeries,
    spec: &NormalizationSpec,
) -> Result<TimeSeries> {
    if series.channels() != reference.channels() {
        return Err(Error::ChannelMismatch {
            left: series.channels(),
            right: reference.channels(),
        });
    }
    if spec.method == NormMethod::None {
        return Ok(series.clone());
    }
    let params = fit(reference, spec.method);
    let mut out = Array2::zeros((series.len(), series.channels()));
    for (ch, p) in params.iter().enumerate() {
        let src = series.values().column(ch);
        let mut dst = out.column_mut(ch);
        if p.scale == 0.0 {
            dst.fill(0.0);
        } else {
            for (d, &s) in dst.iter_mut().zip(src.iter()) {
                *d = (s - p.shift) / p.scale;
            }
        }
    }
    TimeSeries::new(out, series.channel_names().map(<[String]>::to_vec))
}
