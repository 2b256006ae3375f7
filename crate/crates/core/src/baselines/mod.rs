//! Reference anomaly-score baselines.
//!
//! Three score generators that involve no learning at all:
//!
//! * **Case 1** — i.i.d. uniform random scores.
//! * **Case 2** — the norm of the (normalized) input window itself.
//! * **Case 3** — reconstruction error of a frozen, randomly initialized
//!   LSTM encoder-decoder.
//!
//! As the model weights' scale goes to zero, Case 3's reconstruction fades to
//! zero and its scores converge to Case 2's.

mod norm;
mod rnn;

pub use norm::{normalize, NormMethod, NormalizationSpec};
pub use rnn::{default_weight_sigma, RandomEncoderDecoder, RandomModelConfig, DEFAULT_HIDDEN_SIZE};

use ndarray::ArrayView2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::ProtocolConfig;
use crate::series::{LabelSeries, ScoreSeries, TimeSeries};
use crate::sweep::{sweep_best_f1, ThresholdCandidates};

/// Default window length.
pub const DEFAULT_TAU: usize = 120;

/// Which time step a window's score is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alignment {
    /// The window's final step (causal convention).
    Last,
    /// The window's first step.
    First,
}

/// Sliding-window specification. The stride is fixed at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub tau: usize,
    pub alignment: Alignment,
}

impl WindowSpec {
    pub fn new(tau: usize, alignment: Alignment) -> Result<Self> {
        if tau == 0 {
            return Err(Error::invalid_param("tau", "must be at least 1"));
        }
        Ok(Self { tau, alignment })
    }

    /// Window length `tau` with the default `Last` alignment.
    pub fn last(tau: usize) -> Result<Self> {
        Self::new(tau, Alignment::Last)
    }
}

/// How a window's accumulated squared error becomes a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ScoreForm {
    /// `sqrt(sum of squares) / tau` — an L2 norm scaled by the window length.
    /// This is the default form.
    #[default]
    ScaledL2,
    /// `sum of squares / (tau * channels)` — a literal mean of squared
    /// errors, offered for comparison.
    MeanSquares,
}

/// All stride-1 windows of length `tau`: window `t` views rows `[t, t+tau)`.
pub fn make_windows<'a>(
    series: &'a TimeSeries,
    spec: &WindowSpec,
) -> Result<Vec<ArrayView2<'a, f64>>> {
    let t_len = series.len();
    if spec.tau > t_len {
        return Err(Error::WindowOutOfRange {
            tau: spec.tau,
            len: t_len,
        });
    }
    Ok((0..=t_len - spec.tau)
        .map(|t| series.values().slice(ndarray::s![t..t + spec.tau, ..]))
        .collect())
}

/// Spread `T - tau + 1` window scores over all `T` steps: each score lands on
/// its window's aligned step and the uncovered edge replicates the nearest
/// computed score.
fn align_scores(
    window_scores: Vec<f64>,
    tau: usize,
    t_len: usize,
    alignment: Alignment,
) -> Vec<f64> {
    debug_assert_eq!(window_scores.len(), t_len - tau + 1);
    let mut out = Vec::with_capacity(t_len);
    match alignment {
        Alignment::Last => {
            out.extend(std::iter::repeat_n(window_scores[0], tau - 1));
            out.extend(window_scores);
        }
        Alignment::First => {
            let last = *window_scores.last().expect("at least one window");
            out.extend(window_scores);
            out.extend(std::iter::repeat_n(last, tau - 1));
        }
    }
    out
}

fn apply_form(sum_squares: f64, tau: usize, channels: usize, form: ScoreForm) -> f64 {
    match form {
        ScoreForm::ScaledL2 => sum_squares.sqrt() / tau as f64,
        ScoreForm::MeanSquares => sum_squares / (tau * channels) as f64,
    }
}

/// Case 1: i.i.d. U(0, 1) scores, one per time step, deterministic per seed.
pub fn case1_random_scores(length: usize, seed: u64) -> Result<ScoreSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores: Vec<f64> = (0..length).map(|_| rng.random::<f64>()).collect();
    ScoreSeries::new(scores, "case1")
}

fn normalized_input(
    series: &TimeSeries,
    reference: Option<&TimeSeries>,
    nspec: &NormalizationSpec,
) -> Result<TimeSeries> {
    normalize(series, reference.unwrap_or(series), nspec)
}

/// Case 2: each window scores its own norm, `A(w) = (1/tau)·||w||_2` in the
/// default form. Normalization parameters come from `reference` (the
/// training series) or, when `None`, from `series` itself.
pub fn case2_input_norm_scores(
    series: &TimeSeries,
    reference: Option<&TimeSeries>,
    wspec: &WindowSpec,
    nspec: &NormalizationSpec,
    form: ScoreForm,
) -> Result<ScoreSeries> {
    let normed = normalized_input(series, reference, nspec)?;
    let windows = make_windows(&normed, wspec)?;
    let channels = normed.channels();
    let window_scores: Vec<f64> = windows
        .iter()
        .map(|w| {
            let sum_squares = w.iter().map(|&v| v * v).sum();
            apply_form(sum_squares, wspec.tau, channels, form)
        })
        .collect();
    let aligned = align_scores(window_scores, wspec.tau, normed.len(), wspec.alignment);
    ScoreSeries::new(aligned, "case2")
}

/// Case 3: reconstruction error of an untrained random-weight encoder-decoder,
/// `A(w) = (1/tau)·||w - w_hat||_2` in the default form. Weights are drawn
/// once up front, so scoring is deterministic and windows can be processed in
/// parallel.
pub fn case3_untrained_model_scores(
    series: &TimeSeries,
    reference: Option<&TimeSeries>,
    wspec: &WindowSpec,
    nspec: &NormalizationSpec,
    form: ScoreForm,
    mconfig: &RandomModelConfig,
) -> Result<ScoreSeries> {
    let normed = normalized_input(series, reference, nspec)?;
    let windows = make_windows(&normed, wspec)?;
    let channels = normed.channels();
    let model = RandomEncoderDecoder::init(mconfig, channels)?;
    let window_scores: Vec<f64> = windows
        .par_iter()
        .map(|w| {
            let reconstruction = model.reconstruct(*w);
            let sum_squares = w
                .iter()
                .zip(reconstruction.iter())
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            apply_form(sum_squares, wspec.tau, channels, form)
        })
        .collect();
    let aligned = align_scores(window_scores, wspec.tau, normed.len(), wspec.alignment);
    ScoreSeries::new(aligned, "case3")
}

/// Which scored baseline a window-size sweep should use.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineCase {
    Case2,
    Case3(RandomModelConfig),
}

/// One row of a window-size sweep: the best point-wise F1 at window length
/// `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSizeRow {
    pub tau: usize,
    pub best_threshold: f64,
    pub best_f1: f64,
}

/// For each window length in `taus`, generate baseline scores and sweep the
/// best point-wise F1 (threshold grid: all unique scores).
pub fn window_size_sweep(
    series: &TimeSeries,
    reference: Option<&TimeSeries>,
    labels: &LabelSeries,
    taus: &[usize],
    case: &BaselineCase,
    nspec: &NormalizationSpec,
    form: ScoreForm,
) -> Result<Vec<WindowSizeRow>> {
    if taus.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut rows = Vec::with_capacity(taus.len());
    for &tau in taus {
        let wspec = WindowSpec::last(tau)?;
        let scores = match case {
            BaselineCase::Case2 => case2_input_norm_scores(series, reference, &wspec, nspec, form)?,
            BaselineCase::Case3(mconfig) => {
                case3_untrained_model_scores(series, reference, &wspec, nspec, form, mconfig)?
            }
        };
        let sweep = sweep_best_f1(
            &scores,
            labels,
            &ProtocolConfig::point(),
            &ThresholdCandidates::AllUniqueScores,
        )?;
        rows.push(WindowSizeRow {
            tau,
            best_threshold: sweep.best_threshold,
            best_f1: sweep.best_f1,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn ts(values: Array2<f64>) -> TimeSeries {
        TimeSeries::new(values, None).unwrap()
    }

    fn column(values: &[f64]) -> TimeSeries {
        ts(Array2::from_shape_vec((values.len(), 1), values.to_vec()).unwrap())
    }

    #[test]
    fn window_counts_match_stride_one_rule() {
        let series = column(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(
            make_windows(&series, &WindowSpec::last(2).unwrap())
                .unwrap()
                .len(),
            4
        );
        assert_eq!(
            make_windows(&series, &WindowSpec::last(5).unwrap())
                .unwrap()
                .len(),
            1
        );
        let short = column(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            make_windows(&short, &WindowSpec::last(4).unwrap()).unwrap_err(),
            Error::WindowOutOfRange { tau: 4, len: 3 }
        ));
    }

    #[test]
    fn case2_matches_hand_computed_norm() {
        let series = column(&[0.1, 0.2]);
        let scores = case2_input_norm_scores(
            &series,
            None,
            &WindowSpec::last(2).unwrap(),
            &NormalizationSpec::none(),
            ScoreForm::ScaledL2,
        )
        .unwrap();
        let expected = 0.05_f64.sqrt() / 2.0; // ~0.1118
        assert_eq!(scores.len(), 2);
        assert!((scores.as_slice()[1] - expected).abs() < 1e-12);
        assert_eq!(
            scores.as_slice()[0],
            scores.as_slice()[1],
            "edge replication"
        );
    }

    #[test]
    fn all_zero_window_scores_zero_and_spike_raises_score() {
        let flat = column(&[0.0, 0.0, 0.0, 0.0]);
        let spec = WindowSpec::last(2).unwrap();
        let nspec = NormalizationSpec::none();
        let zero =
            case2_input_norm_scores(&flat, None, &spec, &nspec, ScoreForm::ScaledL2).unwrap();
        assert!(zero.as_slice().iter().all(|&s| s == 0.0));

        let spiked = column(&[0.0, 0.0, 5.0, 0.0]);
        let hot =
            case2_input_norm_scores(&spiked, None, &spec, &nspec, ScoreForm::ScaledL2).unwrap();
        assert!(hot.as_slice()[2] > zero.as_slice()[2]);
    }

    #[test]
    fn case2_is_scale_equivariant_for_positive_factors() {
        let base = column(&[0.5, -1.25, 2.0, 0.75, -0.375, 1.5]);
        let scaled = column(&[2.0, -5.0, 8.0, 3.0, -1.5, 6.0]); // base * 4
        let spec = WindowSpec::last(3).unwrap();
        let nspec = NormalizationSpec::none();
        let a = case2_input_norm_scores(&base, None, &spec, &nspec, ScoreForm::ScaledL2).unwrap();
        let b = case2_input_norm_scores(&scaled, None, &spec, &nspec, ScoreForm::ScaledL2).unwrap();
        for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
            // Power-of-two factor keeps the identity exact in floating point.
            assert_eq!(y, 4.0 * x);
        }
    }

    #[test]
    fn alignment_first_pads_the_tail() {
        let series = column(&[0.0, 1.0, 2.0, 3.0]);
        let spec = WindowSpec::new(2, Alignment::First).unwrap();
        let scores = case2_input_norm_scores(
            &series,
            None,
            &spec,
            &NormalizationSpec::none(),
            ScoreForm::ScaledL2,
        )
        .unwrap();
        assert_eq!(scores.len(), 4);
        let v = scores.as_slice();
        assert_eq!(v[2], v[3], "tail replicated under FIRST alignment");
    }

    #[test]
    fn case1_is_deterministic_uniform_with_correct_mean() {
        let a = case1_random_scores(1_000_000, 7).unwrap();
        let b = case1_random_scores(1_000_000, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.as_slice().iter().all(|&v| (0.0..1.0).contains(&v)));
        let mean = a.as_slice().iter().sum::<f64>() / a.len() as f64;
        // 3-sigma bound with sigma^2 = 1/12: 3 * sqrt(1/12) / 1000 < 0.001.
        assert!((mean - 0.5).abs() < 0.003, "mean {mean}");
        assert_ne!(
            case1_random_scores(10, 1).unwrap(),
            case1_random_scores(10, 2).unwrap()
        );
    }

    #[test]
    fn case3_deterministic_and_converges_to_case2_as_sigma_vanishes() {
        let series = ts(Array2::from_shape_fn((40, 2), |(i, j)| {
            ((i * 7 + j * 3) % 11) as f64 / 10.0 + 0.1
        }));
        let spec = WindowSpec::last(5).unwrap();
        let nspec = NormalizationSpec::minmax();
        let config = RandomModelConfig::new(8, 1e-6, 3).unwrap();
        let a = case3_untrained_model_scores(
            &series,
            None,
            &spec,
            &nspec,
            ScoreForm::ScaledL2,
            &config,
        )
        .unwrap();
        let b = case3_untrained_model_scores(
            &series,
            None,
            &spec,
            &nspec,
            ScoreForm::ScaledL2,
            &config,
        )
        .unwrap();
        assert_eq!(a, b);
        let case2 =
            case2_input_norm_scores(&series, None, &spec, &nspec, ScoreForm::ScaledL2).unwrap();
        for (&x, &y) in a.as_slice().iter().zip(case2.as_slice()) {
            if y > 0.0 {
                assert!(((x - y) / y).abs() < 1e-3, "case3 {x} vs case2 {y}");
            }
        }
    }

    #[test]
    fn tau_one_case2_reduces_to_per_point_magnitude() {
        let series = column(&[0.5, -2.0, 0.0, 3.0]);
        let scores = case2_input_norm_scores(
            &series,
            None,
            &WindowSpec::last(1).unwrap(),
            &NormalizationSpec::none(),
            ScoreForm::ScaledL2,
        )
        .unwrap();
        assert_eq!(scores.as_slice(), &[0.5, 2.0, 0.0, 3.0]);
    }

    #[test]
    fn window_size_sweep_returns_one_row_per_tau() {
        let series = column(&[0.1, 0.1, 0.1, 5.0, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1]);
        let labels = LabelSeries::new(vec![0, 0, 0, 1, 0, 0, 0, 0, 0, 0]).unwrap();
        let rows = window_size_sweep(
            &series,
            None,
            &labels,
            &[1, 2, 5],
            &BaselineCase::Case2,
            &NormalizationSpec::none(),
            ScoreForm::ScaledL2,
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].tau, 1);
        assert_eq!(rows[0].best_f1, 1.0, "isolated spike is separable at tau=1");
    }
}
