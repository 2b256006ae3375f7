//! Closed-form behavior of the PA protocol under uniform random scores, and
//! a Monte Carlo simulator that serves as its oracle.
//!
//! Setting: every step's score is an independent U(0, 1) draw and predictions
//! are `score > delta_prime`, so each step is predicted positive with
//! probability `1 - delta_prime`. For a single anomaly segment of length `L`
//! in a series with anomaly ratio `gamma`, point adjustment yields
//!
//! * expected recall `R = 1 - delta_prime^L` (the segment is credited fully
//!   unless all `L` draws miss), and
//! * expected precision `P = gamma·R / (gamma·R + (1-gamma)(1-delta_prime))`
//!   by Bayes' rule: the numerator is the joint mass of (predicted positive,
//!   truly positive) after adjustment and the second denominator term is the
//!   false-positive mass, which adjustment never changes.
//!
//! An alternative precision denominator, `(gamma - delta_prime^L) +
//! (1-gamma)(1-delta_prime)`, is provided for comparison behind
//! [`PrecisionForm`]; it goes negative for some valid parameters (so it
//! cannot be a probability) and the simulator arbitrates between the two —
//! see the `closed_form` integration tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::ConfusionCounts;
use crate::protocol::{evaluate_with_segments, ProtocolConfig};
use crate::segment::{Segment, SegmentSet};
use crate::series::ScoreSeries;

/// Parameters of the single-segment closed-form model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticParams {
    /// Anomaly ratio, strictly between 0 and 1.
    pub gamma: f64,
    /// Length of the anomaly segment, at least 1.
    pub segment_length_l: usize,
    /// Score threshold in [0, 1].
    pub delta_prime: f64,
}

impl AnalyticParams {
    pub fn new(gamma: f64, segment_length_l: usize, delta_prime: f64) -> Result<Self> {
        if !gamma.is_finite() || !(0.0 < gamma && gamma < 1.0) {
            return Err(Error::invalid_param("gamma", "must be in (0, 1)"));
        }
        if segment_length_l == 0 {
            return Err(Error::invalid_param(
                "segment_length_l",
                "must be at least 1",
            ));
        }
        if segment_length_l > i32::MAX as usize {
            return Err(Error::invalid_param("segment_length_l", "too large"));
        }
        if !delta_prime.is_finite() || !(0.0..=1.0).contains(&delta_prime) {
            return Err(Error::invalid_param("delta_prime", "must be in [0, 1]"));
        }
        Ok(Self {
            gamma,
            segment_length_l,
            delta_prime,
        })
    }
}

fn miss_probability(delta_prime: f64, l: usize) -> f64 {
    delta_prime.powi(l as i32)
}

/// Expected PA recall: `1 - delta_prime^L`.
pub fn expected_recall_pa(params: &AnalyticParams) -> f64 {
    1.0 - miss_probability(params.delta_prime, params.segment_length_l)
}

/// Which precision denominator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrecisionForm {
    /// `gamma·R` in the numerator and `gamma·R + (1-gamma)(1-delta')` in the
    /// denominator. This is the form all default paths use.
    BayesConsistent,
    /// Denominator `(gamma - delta'^L) + (1-gamma)(1-delta')`. Kept only for
    /// side-by-side comparison; negative for some valid inputs.
    Alternative,
}

/// Expected PA precision in the Bayes-consistent form. `delta_prime = 1`
/// (no predictions at all) is defined as 0.
pub fn expected_precision_pa(params: &AnalyticParams) -> f64 {
    expected_precision_pa_form(params, PrecisionForm::BayesConsistent)
}

/// Expected PA precision with an explicit choice of denominator form.
pub fn expected_precision_pa_form(params: &AnalyticParams, form: PrecisionForm) -> f64 {
    let recall = expected_recall_pa(params);
    let numerator = params.gamma * recall;
    let fp_mass = (1.0 - params.gamma) * (1.0 - params.delta_prime);
    let denominator = match form {
        PrecisionForm::BayesConsistent => numerator + fp_mass,
        PrecisionForm::Alternative => {
            (params.gamma - miss_probability(params.delta_prime, params.segment_length_l)) + fp_mass
        }
    };
    if denominator == 0.0 {
        0.0
    } else {
        numerator / denominator
    }
}

fn f1_of(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Expected PA precision, recall, and F1 along a grid of thresholds, plus the
/// argmax. F1 is the harmonic mean of the *expected* precision and recall
/// (a ratio of expectations, not an expectation of ratios).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedF1Curve {
    pub gamma: f64,
    pub segment_length_l: usize,
    pub delta_grid: Vec<f64>,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub max_f1: f64,
    pub argmax_delta: f64,
}

/// Evaluate the closed forms over `delta_grid` (values in [0, 1]) using the
/// Bayes-consistent precision form.
pub fn expected_f1_pa_curve(
    gamma: f64,
    segment_length_l: usize,
    delta_grid: &[f64],
) -> Result<ExpectedF1Curve> {
    expected_f1_pa_curve_form(
        gamma,
        segment_length_l,
        delta_grid,
        PrecisionForm::BayesConsistent,
    )
}

/// Like [`expected_f1_pa_curve`] but with an explicit precision form.
pub fn expected_f1_pa_curve_form(
    gamma: f64,
    segment_length_l: usize,
    delta_grid: &[f64],
    form: PrecisionForm,
) -> Result<ExpectedF1Curve> {
    if delta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut precision = Vec::with_capacity(delta_grid.len());
    let mut recall = Vec::with_capacity(delta_grid.len());
    let mut f1 = Vec::with_capacity(delta_grid.len());
    for &delta_prime in delta_grid {
        let params = AnalyticParams::new(gamma, segment_length_l, delta_prime)?;
        let p = expected_precision_pa_form(&params, form);
        let r = expected_recall_pa(&params);
        precision.push(p);
        recall.push(r);
        f1.push(f1_of(p, r));
    }
    let mut argmax = 0;
    for (i, &v) in f1.iter().enumerate().skip(1) {
        if v > f1[argmax] {
            argmax = i;
        }
    }
    Ok(ExpectedF1Curve {
        gamma,
        segment_length_l,
        delta_grid: delta_grid.to_vec(),
        precision,
        recall,
        max_f1: f1[argmax],
        argmax_delta: delta_grid[argmax],
        f1,
    })
}

/// A dense default threshold grid: 0 to 1 in steps of 1e-4. The expected-F1
/// optimum sits very close to 1 for long segments, so coarse grids
/// understate the maximum.
pub fn default_delta_grid() -> Vec<f64> {
    (0..=10_000).map(|i| f64::from(i) / 10_000.0).collect()
}

/// A segment arrangement for simulation; wraps a [`SegmentSet`] and exposes
/// its implied anomaly ratio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLayout {
    segments: SegmentSet,
}

impl SegmentLayout {
    pub fn new(segments: SegmentSet) -> Result<Self> {
        if segments.num_segments() == 0 {
            return Err(Error::Empty("segment layout"));
        }
        Ok(Self { segments })
    }

    /// One segment of length `segment_length_l` centered in a series sized so
    /// the anomaly ratio comes out as close to `gamma` as integer lengths
    /// allow. Use [`SegmentLayout::gamma`] for the realized ratio.
    pub fn single_for(gamma: f64, segment_length_l: usize) -> Result<Self> {
        if !gamma.is_finite() || !(0.0 < gamma && gamma < 1.0) {
            return Err(Error::invalid_param("gamma", "must be in (0, 1)"));
        }
        if segment_length_l == 0 {
            return Err(Error::invalid_param(
                "segment_length_l",
                "must be at least 1",
            ));
        }
        let total = (segment_length_l as f64 / gamma).round() as usize;
        if total <= segment_length_l {
            return Err(Error::invalid_param(
                "gamma",
                "rounds to a series no longer than the segment",
            ));
        }
        let start = (total - segment_length_l) / 2;
        let segment = Segment::new(start, start + segment_length_l, total)?;
        Self::new(SegmentSet::new(vec![segment], total)?)
    }

    pub fn segments(&self) -> &SegmentSet {
        &self.segments
    }

    pub fn total_length(&self) -> usize {
        self.segments.total_length()
    }

    /// Realized anomaly ratio: covered steps / total steps.
    pub fn gamma(&self) -> f64 {
        self.segments.covered() as f64 / self.segments.total_length() as f64
    }
}

/// Length-weighted expected PA recall for a multi-segment layout. Each
/// segment is detected independently with probability `1 - delta'^{L_m}` and
/// contributes its full length when detected, so
/// `E[recall] = sum L_m (1 - delta'^{L_m}) / sum L_m`.
pub fn expected_recall_pa_multi(layout: &SegmentLayout, delta_prime: f64) -> f64 {
    let covered = layout.segments.covered() as f64;
    let expected_tp: f64 = layout
        .segments
        .segments()
        .iter()
        .map(|seg| seg.len() as f64 * (1.0 - miss_probability(delta_prime, seg.len())))
        .sum();
    expected_tp / covered
}

/// Multi-segment analogue of the Bayes-consistent expected precision:
/// `E[TP] / (E[TP] + E[FP])` with `E[FP] = (T - sum L_m)(1 - delta')`.
pub fn expected_precision_pa_multi(layout: &SegmentLayout, delta_prime: f64) -> f64 {
    let expected_tp: f64 = layout
        .segments
        .segments()
        .iter()
        .map(|seg| seg.len() as f64 * (1.0 - miss_probability(delta_prime, seg.len())))
        .sum();
    let outside = (layout.total_length() - layout.segments.covered()) as f64;
    let expected_fp = outside * (1.0 - delta_prime);
    let denominator = expected_tp + expected_fp;
    if denominator == 0.0 {
        0.0
    } else {
        expected_tp / denominator
    }
}

/// Aggregated simulation results.
///
/// `mean_precision` is the pooled ratio of sums `sum TP / sum (TP + FP)` —
/// the estimator that converges to the closed form's ratio of expectations.
/// A per-trial mean of precisions would carry a Jensen bias of several
/// standard errors at these trial counts. Recall's denominator is identical
/// across trials, so its pooled ratio and per-trial mean coincide.
/// `mean_f1` is the harmonic mean of the pooled precision and recall, with
/// a first-order (delta-method, covariance ignored) standard error; the
/// per-trial F1 statistics are reported alongside so the gap between the two
/// estimators stays visible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f1: f64,
    pub stderr_precision: f64,
    pub stderr_recall: f64,
    pub stderr_f1: f64,
    pub per_trial_mean_f1: f64,
    pub per_trial_std_f1: f64,
}

fn sample_std(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Simulate uniform random scores over `layout`, thresholded at
/// `delta_prime` and scored under `config`, for `trials` independent trials.
///
/// Each trial draws its scores from its own deterministic stream of the
/// master seed, and trials are aggregated in index order, so the report is
/// identical regardless of how many threads run the trials.
pub fn monte_carlo_pa(
    layout: &SegmentLayout,
    delta_prime: f64,
    trials: usize,
    seed: u64,
    config: &ProtocolConfig,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::invalid_param("trials", "must be at least 1"));
    }
    if !delta_prime.is_finite() || !(0.0..=1.0).contains(&delta_prime) {
        return Err(Error::invalid_param("delta_prime", "must be in [0, 1]"));
    }
    let labels = layout.segments.to_labels();
    let segments = &layout.segments;
    let t_len = layout.total_length();

    let counts: Vec<ConfusionCounts> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial);
            let draws: Vec<f64> = (0..t_len).map(|_| rng.random::<f64>()).collect();
            let scores = ScoreSeries::new(draws, "monte-carlo").expect("draws are finite");
            evaluate_with_segments(&scores, &labels, segments, delta_prime, config)
                .expect("validated inputs")
                .counts
        })
        .collect();

    let n = trials as f64;
    let covered = segments.covered() as f64;
    let recalls: Vec<f64> = counts.iter().map(|c| c.tp as f64 / covered).collect();
    let mean_recall = recalls.iter().sum::<f64>() / n;
    let stderr_recall = sample_std(&recalls, mean_recall) / n.sqrt();

    let tps: Vec<f64> = counts.iter().map(|c| c.tp as f64).collect();
    let predicted: Vec<f64> = counts.iter().map(|c| (c.tp + c.fp) as f64).collect();
    let mean_tp = tps.iter().sum::<f64>() / n;
    let mean_predicted = predicted.iter().sum::<f64>() / n;
    let (mean_precision, stderr_precision) = if mean_predicted == 0.0 {
        (0.0, 0.0)
    } else {
        let ratio = mean_tp / mean_predicted;
        // Linearized variance of a ratio of means: sd(a - ratio·b) / (b̄·√n).
        let residuals: Vec<f64> = tps
            .iter()
            .zip(&predicted)
            .map(|(&a, &b)| a - ratio * b)
            .collect();
        let stderr = sample_std(&residuals, 0.0) / (mean_predicted * n.sqrt());
        (ratio, stderr)
    };

    let mean_f1 = f1_of(mean_precision, mean_recall);
    let stderr_f1 = if mean_precision + mean_recall == 0.0 {
        0.0
    } else {
        let denom = (mean_precision + mean_recall) * (mean_precision + mean_recall);
        let dp = 2.0 * mean_recall * mean_recall / denom;
        let dr = 2.0 * mean_precision * mean_precision / denom;
        ((dp * stderr_precision).powi(2) + (dr * stderr_recall).powi(2)).sqrt()
    };

    let per_trial_f1: Vec<f64> = counts
        .iter()
        .map(|c| {
            let p = if c.tp + c.fp == 0 {
                0.0
            } else {
                c.tp as f64 / (c.tp + c.fp) as f64
            };
            let r = c.tp as f64 / covered;
            f1_of(p, r)
        })
        .collect();
    let per_trial_mean_f1 = per_trial_f1.iter().sum::<f64>() / n;
    let per_trial_std_f1 = sample_std(&per_trial_f1, per_trial_mean_f1);

    Ok(MonteCarloReport {
        trials,
        mean_precision,
        mean_recall,
        mean_f1,
        stderr_precision,
        stderr_recall,
        stderr_f1,
        per_trial_mean_f1,
        per_trial_std_f1,
    })
}
