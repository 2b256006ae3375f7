//! Pearson product-moment and Kendall tau-b correlation.
//!
//! Kendall tau-b is computed with Knight's O(n log n) algorithm: sort by
//! `(x, y)`, count tie groups, and count discordant pairs as strict
//! inversions of the y sequence via merge sort.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Correlation coefficients between two equal-length vectors. A coefficient
/// is `None` when undefined (zero variance in either input).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub pearson_pcc: Option<f64>,
    pub kendall_krc: Option<f64>,
    pub n_points: usize,
}

fn validate(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::invalid_param("inputs", "need at least 2 points"));
    }
    for (name, v) in [("xs", xs), ("ys", ys)] {
        if let Some(idx) = v.iter().position(|e| !e.is_finite()) {
            return Err(Error::NonFinite {
                what: if name == "xs" { "xs" } else { "ys" },
                index: idx,
            });
        }
    }
    Ok(())
}

/// Compute both coefficients.
pub fn correlate(xs: &[f64], ys: &[f64]) -> Result<CorrelationReport> {
    validate(xs, ys)?;
    Ok(CorrelationReport {
        pearson_pcc: pearson(xs, ys),
        kendall_krc: kendall_tau_b(xs, ys),
        n_points: xs.len(),
    })
}

fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        None
    } else {
        Some(sxy / (sxx * syy).sqrt())
    }
}

/// Pairs within tied runs of an already-sorted slice: sum of c·(c−1)/2.
fn tied_pairs_sorted<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for i in 1..sorted.len() {
        if sorted[i] == sorted[i - 1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Count strict inversions (i < j with v[i] > v[j]) by merge sort.
fn count_inversions(values: &mut [f64], scratch: &mut [f64]) -> u64 {
    let n = values.len();
    if n <= 1 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = values.split_at_mut(mid);
    let mut inversions = count_inversions(left, scratch) + count_inversions(right, scratch);
    let (mut i, mut j, mut k) = (0usize, 0usize, 0usize);
    while i < left.len() && j < right.len() {
        if right[j] < left[i] {
            inversions += (left.len() - i) as u64;
            scratch[k] = right[j];
            j += 1;
        } else {
            scratch[k] = left[i];
            i += 1;
        }
        k += 1;
    }
    scratch[k..k + left.len() - i].copy_from_slice(&left[i..]);
    let tail = k + left.len() - i;
    scratch[tail..n].copy_from_slice(&right[j..]);
    values.copy_from_slice(&scratch[..n]);
    inversions
}

/// Kendall's tau-b in O(n log n) via merge-sort inversion counting, with the
/// standard tie corrections. `None` when every pair is tied in x or in y.
pub fn kendall_tau_b(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("validated finite")
            .then(a.1.partial_cmp(&b.1).expect("validated finite"))
    });

    let n0 = (n as u64) * (n as u64 - 1) / 2;
    let xs_sorted: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let n1 = tied_pairs_sorted(&xs_sorted);
    let n3 = tied_pairs_sorted(&pairs);
    let mut ys_by_x: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut ys_sorted = ys_by_x.clone();
    ys_sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("validated finite"));
    let n2 = tied_pairs_sorted(&ys_sorted);

    if n1 == n0 || n2 == n0 {
        return None; // all x tied or all y tied
    }

    let mut scratch = vec![0.0; n];
    let discordant = count_inversions(&mut ys_by_x, &mut scratch);
    // C + D = n0 − n1 − n2 + n3, so C − D = that total minus 2D.
    let numerator = (n0 + n3) as i128 - (n1 + n2) as i128 - 2 * discordant as i128;
    let denominator = (((n0 - n1) as f64) * ((n0 - n2) as f64)).sqrt();
    Some(numerator as f64 / denominator)
}

/// O(n²) Kendall tau-b by explicit pairwise comparison; intended as a test
/// oracle.
pub fn kendall_tau_b_brute(xs: &[f64], ys: &[f64]) -> Result<Option<f64>> {
    validate(xs, ys)?;
    let n = xs.len();
    let (mut concordant, mut discordant) = (0u64, 0u64);
    let (mut ties_x, mut ties_y) = (0u64, 0u64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = xs[i].partial_cmp(&xs[j]).expect("validated finite");
            let dy = ys[i].partial_cmp(&ys[j]).expect("validated finite");
            use std::cmp::Ordering::Equal;
            match (dx, dy) {
                (Equal, Equal) => {
                    ties_x += 1;
                    ties_y += 1;
                }
                (Equal, _) => ties_x += 1,
                (_, Equal) => ties_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n0 = (n as u64) * (n as u64 - 1) / 2;
    if ties_x == n0 || ties_y == n0 {
        return Ok(None);
    }
    let numerator = concordant as f64 - discordant as f64;
    let denominator = (((n0 - ties_x) as f64) * ((n0 - ties_y) as f64)).sqrt();
    Ok(Some(numerator / denominator))
}
