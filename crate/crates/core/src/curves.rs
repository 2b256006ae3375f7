//! Threshold-free ranking curves: ROC with AUROC and precision-recall with
//! AUPR.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{LabelSeries, ScoreSeries};

/// ROC and PR curves over all distinct score thresholds, with trapezoidal
/// areas.
///
/// `roc_points` are `(fpr, tpr)` from `(0, 0)` to `(1, 1)`; `pr_points` are
/// `(recall, precision)` anchored at `(0, 1)`. Tied scores are collapsed into
/// one curve step, which makes the trapezoidal AUROC equal the pairwise
/// ranking probability with half credit for ties.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocPrCurves {
    pub roc_points: Vec<(f64, f64)>,
    pub pr_points: Vec<(f64, f64)>,
    pub auroc: f64,
    pub aupr: f64,
}

fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

/// Compute ROC/PR curves and their areas. Labels must contain both classes.
pub fn roc_pr(scores: &ScoreSeries, labels: &LabelSeries) -> Result<RocPrCurves> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let positives = labels.positives();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }

    let s = scores.as_slice();
    let y = labels.as_slice();
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_unstable_by(|&a, &b| s[b].partial_cmp(&s[a]).expect("scores are finite"));

    let mut roc_points = vec![(0.0, 0.0)];
    let mut pr_points = vec![(0.0, 1.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let value = s[order[i]];
        // Consume the whole group of tied scores before emitting a point.
        while i < order.len() && s[order[i]] == value {
            if y[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        roc_points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
        pr_points.push((tp as f64 / positives as f64, tp as f64 / (tp + fp) as f64));
    }

    let auroc = trapezoid(&roc_points);
    let aupr = trapezoid(&pr_points);
    Ok(RocPrCurves {
        roc_points,
        pr_points,
        auroc,
        aupr,
    })
}

/// Brute-force AUROC: the fraction of (positive, negative) pairs ranked
/// correctly, with half credit for ties. O(P × N); intended as a test oracle.
pub fn auroc_pairwise(scores: &ScoreSeries, labels: &LabelSeries) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let s = scores.as_slice();
    let y = labels.as_slice();
    let pos: Vec<f64> = s
        .iter()
        .zip(y)
        .filter(|(_, &l)| l == 1)
        .map(|(&v, _)| v)
        .collect();
    let neg: Vec<f64> = s
        .iter()
        .zip(y)
        .filter(|(_, &l)| l == 0)
        .map(|(&v, _)| v)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::SingleClass);
    }
    let mut credit = 0.0;
    for &p in &pos {
        for &n in &neg {
            if p > n {
                credit += 1.0;
            } else if p == n {
                credit += 0.5;
            }
        }
    }
    Ok(credit / (pos.len() as f64 * neg.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scores(values: &[f64]) -> ScoreSeries {
        ScoreSeries::new(values.to_vec(), "test").unwrap()
    }

    fn labels(bits: &[u8]) -> LabelSeries {
        LabelSeries::new(bits.to_vec()).unwrap()
    }

    #[test]
    fn perfect_inverted_and_tied_rankings() {
        let y = labels(&[0, 1]);
        assert_eq!(roc_pr(&scores(&[0.1, 0.9]), &y).unwrap().auroc, 1.0);
        assert_eq!(roc_pr(&scores(&[0.9, 0.1]), &y).unwrap().auroc, 0.0);
        assert_eq!(roc_pr(&scores(&[0.5, 0.5]), &y).unwrap().auroc, 0.5);
    }

    #[test]
    fn roc_endpoints_are_corners() {
        let curves = roc_pr(&scores(&[0.2, 0.8, 0.5, 0.5]), &labels(&[0, 1, 1, 0])).unwrap();
        assert_eq!(*curves.roc_points.first().unwrap(), (0.0, 0.0));
        assert_eq!(*curves.roc_points.last().unwrap(), (1.0, 1.0));
        assert_eq!(*pr_first(&curves), (0.0, 1.0));
        assert!((curves.aupr - 0.0).abs() <= 1.0);
    }

    fn pr_first(c: &RocPrCurves) -> &(f64, f64) {
        c.pr_points.first().unwrap()
    }

    #[test]
    fn trapezoid_auroc_matches_pairwise_oracle_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let t = 200;
            // Quantized scores force plenty of ties.
            let s_vals: Vec<f64> = (0..t)
                .map(|_| (rng.random::<f64>() * 20.0).floor() / 20.0)
                .collect();
            let y_vals: Vec<u8> = (0..t)
                .map(|_| u8::from(rng.random::<f64>() < 0.25))
                .collect();
            if y_vals.iter().all(|&v| v == 0) || y_vals.iter().all(|&v| v == 1) {
                continue;
            }
            let s = scores(&s_vals);
            let y = labels(&y_vals);
            let fast = roc_pr(&s, &y).unwrap().auroc;
            let slow = auroc_pairwise(&s, &y).unwrap();
            assert!((fast - slow).abs() <= 1e-12, "fast={fast} slow={slow}");
        }
    }

    #[test]
    fn single_class_labels_rejected() {
        let s = scores(&[0.1, 0.9]);
        assert!(matches!(
            roc_pr(&s, &labels(&[0, 0])).unwrap_err(),
            Error::SingleClass
        ));
        assert!(matches!(
            roc_pr(&s, &labels(&[1, 1])).unwrap_err(),
            Error::SingleClass
        ));
    }

    #[test]
    fn areas_stay_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let s_vals: Vec<f64> = (0..100).map(|_| rng.random::<f64>()).collect();
            let mut y_vals: Vec<u8> = (0..100)
                .map(|_| u8::from(rng.random::<f64>() < 0.3))
                .collect();
            y_vals[0] = 1;
            y_vals[1] = 0;
            let curves = roc_pr(&scores(&s_vals), &labels(&y_vals)).unwrap();
            assert!((0.0..=1.0).contains(&curves.auroc));
            assert!((0.0..=1.0).contains(&curves.aupr));
        }
    }
}
