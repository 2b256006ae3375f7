//! Best-F1 threshold sweeps and the F1-vs-K curve.
//!
//! Two sweep implementations are exposed: [`sweep_best_f1_naive`], a direct
//! per-threshold oracle, and [`sweep_best_f1`], an optimized single pass over
//! globally sorted scores with incremental per-segment hit counts. The two
//! produce bit-identical results: they compute the same integer confusion
//! counts for every candidate (both use the strict `score > delta` rule and
//! the same segment-detection predicate), feed them through the same
//! `prf1`, and pick the best index with the same tie-breaking argmax.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{prf1, ConfusionCounts, MetricsTriple};
use crate::protocol::{evaluate_with_segments, percent_k_fires, Protocol, ProtocolConfig};
use crate::segment::SegmentSet;
use crate::series::{LabelSeries, ScoreSeries};

/// How to pick candidate thresholds for a sweep.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ThresholdCandidates {
    /// Every distinct score value, plus a `-inf` sentinel so the all-positive
    /// prediction is reachable under the strict `>` rule.
    #[default]
    AllUniqueScores,
    /// `n` evenly spaced empirical quantiles of the scores, plus the `-inf`
    /// sentinel. A coarser alternative for very long series.
    Quantiles(usize),
    /// A caller-supplied grid (deduplicated and sorted; NaN rejected).
    Explicit(Vec<f64>),
}

/// Default quantile count for [`ThresholdCandidates::Quantiles`].
pub const DEFAULT_QUANTILES: usize = 2000;

impl ThresholdCandidates {
    /// Materialize the candidate grid for `scores`, strictly increasing.
    pub fn resolve(&self, scores: &ScoreSeries) -> Result<Vec<f64>> {
        match self {
            Self::AllUniqueScores => {
                let mut sorted = scores.as_slice().to_vec();
                sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
                sorted.dedup();
                let mut grid = Vec::with_capacity(sorted.len() + 1);
                grid.push(f64::NEG_INFINITY);
                grid.extend(sorted);
                Ok(grid)
            }
            Self::Quantiles(n) => {
                let n = *n;
                if n == 0 {
                    return Err(Error::EmptyCandidates);
                }
                let mut sorted = scores.as_slice().to_vec();
                sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
                let last = sorted.len() - 1;
                let mut grid = vec![f64::NEG_INFINITY];
                for i in 0..n {
                    // Quantile level i/(n-1) mapped onto sorted ranks.
                    let idx = if n == 1 { last / 2 } else { i * last / (n - 1) };
                    grid.push(sorted[idx]);
                }
                grid.dedup();
                Ok(grid)
            }
            Self::Explicit(values) => {
                if values.is_empty() {
                    return Err(Error::EmptyCandidates);
                }
                if values.iter().any(|v| v.is_nan()) {
                    return Err(Error::invalid_param("candidates", "must not contain NaN"));
                }
                let mut grid = values.clone();
                grid.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN rejected above"));
                grid.dedup();
                Ok(grid)
            }
        }
    }
}

/// Per-threshold metrics from a sweep plus the best-F1 entry.
///
/// `thresholds` is strictly increasing and aligned with `metrics`;
/// `best_index` is the first (lowest-threshold) index attaining the maximum
/// F1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: ProtocolConfig,
    pub thresholds: Vec<f64>,
    pub metrics: Vec<MetricsTriple>,
    pub best_index: usize,
    pub best_threshold: f64,
    pub best_f1: f64,
}

impl SweepResult {
    pub fn best_metrics(&self) -> MetricsTriple {
        self.metrics[self.best_index]
    }
}

/// First index attaining the maximum F1. Shared by both sweep paths so their
/// tie-breaking is identical.
fn argmax_f1(metrics: &[MetricsTriple]) -> usize {
    let mut best = 0;
    for (i, m) in metrics.iter().enumerate().skip(1) {
        if m.f1 > metrics[best].f1 {
            best = i;
        }
    }
    best
}

fn finish_sweep(
    config: &ProtocolConfig,
    thresholds: Vec<f64>,
    metrics: Vec<MetricsTriple>,
) -> SweepResult {
    let best_index = argmax_f1(&metrics);
    SweepResult {
        config: *config,
        best_threshold: thresholds[best_index],
        best_f1: metrics[best_index].f1,
        best_index,
        thresholds,
        metrics,
    }
}

fn check_lengths(scores: &ScoreSeries, labels: &LabelSeries) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    Ok(())
}

/// Reference sweep: evaluates every candidate independently, O(candidates × T).
pub fn sweep_best_f1_naive(
    scores: &ScoreSeries,
    labels: &LabelSeries,
    config: &ProtocolConfig,
    candidates: &ThresholdCandidates,
) -> Result<SweepResult> {
    check_lengths(scores, labels)?;
    let thresholds = candidates.resolve(scores)?;
    let segments = SegmentSet::from_labels(labels);
    let mut metrics = Vec::with_capacity(thresholds.len());
    for &delta in &thresholds {
        metrics.push(evaluate_with_segments(scores, labels, &segments, delta, config)?.metrics);
    }
    Ok(finish_sweep(config, thresholds, metrics))
}

/// Minimal in-segment hit count at which a segment of length `len` fires
/// under the given protocol; `len + 1` means "never".
///
/// For PA%K the predicate `hits/len > k/100` is monotone in `hits` (floating
/// division rounds monotonically), so the switch point is found by binary
/// search over the exact comparison the naive path uses.
fn min_hits_to_fire(len: usize, config: &ProtocolConfig) -> usize {
    match config.protocol {
        Protocol::Point => len + 1,
        Protocol::PointAdjust => 1,
        Protocol::PointAdjustPercentK => {
            if !percent_k_fires(len, len, config.k_percent) {
                return len + 1;
            }
            let (mut lo, mut hi) = (1usize, len);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if percent_k_fires(mid, len, config.k_percent) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            lo
        }
    }
}

/// Optimized sweep: one descending walk over globally sorted scores.
///
/// Candidates are visited from highest to lowest; each step whose score
/// exceeds the current candidate is switched on exactly once, updating either
/// the outside-segment false-positive count or its segment's hit count. A
/// segment's true-positive contribution is its raw hit count until the hit
/// count reaches the protocol's firing point, at which moment the
/// contribution jumps to the full segment length — precisely what label
/// adjustment does. Runs in O(T log T + candidates).
pub fn sweep_best_f1(
    scores: &ScoreSeries,
    labels: &LabelSeries,
    config: &ProtocolConfig,
    candidates: &ThresholdCandidates,
) -> Result<SweepResult> {
    check_lengths(scores, labels)?;
    if config.protocol == Protocol::PointAdjustPercentK {
        // Surface the same parameter validation the naive path performs.
        ProtocolConfig::percent_k(config.k_percent)?;
    }
    let thresholds = candidates.resolve(scores)?;
    let segments = SegmentSet::from_labels(labels);
    let t_len = scores.len();
    let s = scores.as_slice();

    const OUTSIDE: u32 = u32::MAX;
    let mut seg_of = vec![OUTSIDE; t_len];
    for (m, seg) in segments.segments().iter().enumerate() {
        for slot in &mut seg_of[seg.start..seg.end] {
            *slot = m as u32;
        }
    }
    let seg_len: Vec<usize> = segments.segments().iter().map(|seg| seg.len()).collect();
    let fire_at: Vec<usize> = seg_len
        .iter()
        .map(|&len| min_hits_to_fire(len, config))
        .collect();

    let mut order: Vec<u32> = (0..t_len as u32).collect();
    order.sort_unstable_by(|&a, &b| {
        s[b as usize]
            .partial_cmp(&s[a as usize])
            .expect("scores are finite")
    });

    let positives: usize = seg_len.iter().sum();
    let negatives = t_len - positives;
    let mut hits = vec![0usize; seg_len.len()];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut walker = 0usize;
    let mut metrics_desc = Vec::with_capacity(thresholds.len());

    for &delta in thresholds.iter().rev() {
        while walker < t_len && s[order[walker] as usize] > delta {
            let t = order[walker] as usize;
            match seg_of[t] {
                OUTSIDE => fp += 1,
                m => {
                    let m = m as usize;
                    hits[m] += 1;
                    if hits[m] < fire_at[m] {
                        tp += 1;
                    } else if hits[m] == fire_at[m] {
                        tp += seg_len[m] - (hits[m] - 1);
                    }
                }
            }
            walker += 1;
        }
        let counts = ConfusionCounts {
            tp,
            fp,
            tn: negatives - fp,
            fn_: positives - tp,
        };
        metrics_desc.push(prf1(counts));
    }
    metrics_desc.reverse();
    Ok(finish_sweep(config, thresholds, metrics_desc))
}

/// F1 under PA%K at a fixed threshold for each K in the grid, plus the area
/// under the curve on the K/100 axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSweepCurve {
    pub delta: f64,
    pub k_values: Vec<f64>,
    pub f1_values: Vec<f64>,
    pub auc: f64,
}

/// The default K grid: 0, 10, …, 100.
pub fn default_k_grid() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) * 10.0).collect()
}

/// Evaluate F1 under PA%K at threshold `delta` for every K in `k_grid`
/// (which must be sorted ascending within `[0, 100]`) and integrate the curve
/// with the trapezoidal rule over K/100.
pub fn k_sweep(
    scores: &ScoreSeries,
    labels: &LabelSeries,
    delta: f64,
    k_grid: &[f64],
) -> Result<KSweepCurve> {
    if k_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if k_grid.windows(2).any(|w| {
        !matches!(
            w[0].partial_cmp(&w[1]),
            Some(Ordering::Less | Ordering::Equal)
        )
    }) {
        return Err(Error::invalid_param("k_grid", "must be sorted ascending"));
    }
    check_lengths(scores, labels)?;
    let segments = SegmentSet::from_labels(labels);
    let mut f1_values = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        let config = ProtocolConfig::percent_k(k)?;
        let eval = evaluate_with_segments(scores, labels, &segments, delta, &config)?;
        f1_values.push(eval.metrics.f1);
    }
    let mut auc = 0.0;
    for i in 1..k_grid.len() {
        let width = (k_grid[i] - k_grid[i - 1]) / 100.0;
        auc += width * (f1_values[i] + f1_values[i - 1]) / 2.0;
    }
    Ok(KSweepCurve {
        delta,
        k_values: k_grid.to_vec(),
        f1_values,
        auc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::evaluate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn labels(bits: &[u8]) -> LabelSeries {
        LabelSeries::new(bits.to_vec()).unwrap()
    }

    fn scores(values: &[f64]) -> ScoreSeries {
        ScoreSeries::new(values.to_vec(), "test").unwrap()
    }

    #[test]
    fn separable_scores_reach_perfect_f1() {
        let result = sweep_best_f1(
            &scores(&[0.1, 0.9]),
            &labels(&[0, 1]),
            &ProtocolConfig::point(),
            &ThresholdCandidates::AllUniqueScores,
        )
        .unwrap();
        assert_eq!(result.best_f1, 1.0);
        assert_eq!(result.best_threshold, 0.1);
        assert_eq!(result.thresholds[0], f64::NEG_INFINITY);
    }

    #[test]
    fn thresholds_strictly_increasing_with_duplicates_in_scores() {
        let result = sweep_best_f1(
            &scores(&[0.5, 0.5, 0.2, 0.9, 0.2]),
            &labels(&[0, 1, 0, 1, 0]),
            &ProtocolConfig::point_adjust(),
            &ThresholdCandidates::AllUniqueScores,
        )
        .unwrap();
        assert!(result.thresholds.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(result.thresholds.len(), 4); // -inf, 0.2, 0.5, 0.9
    }

    #[test]
    fn optimized_matches_naive_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let t = 60;
            let s: Vec<f64> = (0..t).map(|_| rng.random::<f64>()).collect();
            let y: Vec<u8> = (0..t)
                .map(|_| u8::from(rng.random::<f64>() < 0.3))
                .collect();
            let y = if y.iter().all(|&v| v == 0) {
                labels(&[vec![1u8], y[1..].to_vec()].concat())
            } else {
                labels(&y)
            };
            let s = scores(&s);
            for config in [
                ProtocolConfig::point(),
                ProtocolConfig::point_adjust(),
                ProtocolConfig::percent_k(35.0).unwrap(),
            ] {
                let fast =
                    sweep_best_f1(&s, &y, &config, &ThresholdCandidates::AllUniqueScores).unwrap();
                let slow =
                    sweep_best_f1_naive(&s, &y, &config, &ThresholdCandidates::AllUniqueScores)
                        .unwrap();
                assert_eq!(fast, slow, "trial {trial} protocol {:?}", config.protocol);
            }
        }
    }

    #[test]
    fn quantile_grid_is_sparser_and_keeps_sentinel() {
        let values: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
        let s = scores(&values);
        let grid = ThresholdCandidates::Quantiles(11).resolve(&s).unwrap();
        assert_eq!(grid.len(), 12);
        assert_eq!(grid[0], f64::NEG_INFINITY);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*grid.last().unwrap(), 0.999);
    }

    #[test]
    fn explicit_grid_sorted_and_deduped() {
        let s = scores(&[0.3, 0.7]);
        let grid = ThresholdCandidates::Explicit(vec![0.9, 0.1, 0.9, 0.5])
            .resolve(&s)
            .unwrap();
        assert_eq!(grid, vec![0.1, 0.5, 0.9]);
        assert!(ThresholdCandidates::Explicit(vec![]).resolve(&s).is_err());
        assert!(ThresholdCandidates::Explicit(vec![f64::NAN])
            .resolve(&s)
            .is_err());
    }

    #[test]
    fn k_sweep_endpoints_match_pa_and_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = 120;
        let s_vals: Vec<f64> = (0..t).map(|_| rng.random::<f64>()).collect();
        let mut y_vals = vec![0u8; t];
        y_vals[20..45].fill(1);
        y_vals[80..85].fill(1);
        let s = scores(&s_vals);
        let y = labels(&y_vals);
        let delta = 0.6;
        let curve = k_sweep(&s, &y, delta, &default_k_grid()).unwrap();
        let pa = evaluate(&s, &y, delta, &ProtocolConfig::point_adjust()).unwrap();
        let point = evaluate(&s, &y, delta, &ProtocolConfig::point()).unwrap();
        assert_eq!(curve.f1_values[0], pa.metrics.f1);
        assert_eq!(*curve.f1_values.last().unwrap(), point.metrics.f1);
        assert!(
            curve.f1_values.windows(2).all(|w| w[0] >= w[1]),
            "monotone non-increasing in K"
        );
    }

    #[test]
    fn perfect_predictions_give_flat_unit_curve() {
        let y = labels(&[0, 1, 1, 0, 1]);
        let s = scores(&[0.0, 1.0, 1.0, 0.0, 1.0]);
        let curve = k_sweep(&s, &y, 0.5, &default_k_grid()).unwrap();
        assert!(curve.f1_values.iter().all(|&f| f == 1.0));
        assert!((curve.auc - 1.0).abs() < 1e-15);
    }

    #[test]
    fn k_sweep_rejects_bad_grids() {
        let s = scores(&[0.1, 0.9]);
        let y = labels(&[0, 1]);
        assert!(matches!(
            k_sweep(&s, &y, 0.5, &[]).unwrap_err(),
            Error::EmptyGrid
        ));
        assert!(k_sweep(&s, &y, 0.5, &[50.0, 10.0]).is_err());
        assert!(k_sweep(&s, &y, 0.5, &[-5.0, 10.0]).is_err());
    }

    #[test]
    fn min_hits_binary_search_agrees_with_scan() {
        for len in [1usize, 2, 3, 7, 10, 33, 100] {
            for k in [0.0, 5.0, 10.0, 33.3333333, 50.0, 99.0, 100.0] {
                let config = ProtocolConfig::percent_k(k).unwrap();
                let by_search = min_hits_to_fire(len, &config);
                let by_scan = (1..=len)
                    .find(|&h| percent_k_fires(h, len, k))
                    .unwrap_or(len + 1);
                assert_eq!(by_search, by_scan, "len={len} k={k}");
            }
        }
    }
}
