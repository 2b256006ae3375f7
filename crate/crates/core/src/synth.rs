//! Deterministic synthetic data: multivariate base signals with labeled
//! anomaly injections, plus random segment layouts with prescribed
//! statistics.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::analytic::SegmentLayout;
use crate::error::{Error, Result};
use crate::segment::{Segment, SegmentSet};
use crate::series::{LabelSeries, TimeSeries};

/// Waveform family for the clean signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseSignal {
    /// Per channel, a sum of three sinusoids with incommensurate periods plus
    /// Gaussian observation noise.
    SineMix,
    /// Per channel, a Gaussian random walk with step deviation `noise_std`.
    RandomWalk,
}

/// Anomaly family to inject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InjectionKind {
    /// Sparse large-magnitude spikes inside the labeled window. Real
    /// benchmark labels usually mark a whole alarm window around brief
    /// spike instants, so only a random subset of the window's steps
    /// (roughly one in eight, always at least one) carries a spike.
    Point,
    /// The waveform is replaced by a square wave of comparable amplitude:
    /// a shape change at a normal level.
    Contextual,
    /// A slow ramp plus accumulated low-amplitude noise over the window.
    Collective,
}

/// One labeled injection into the test half. `start`/`end` are half-open
/// test-local step indices; `magnitude` is expressed in units of the
/// affected channel's clean standard deviation, so injections are invariant
/// to later normalization choices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionSpec {
    pub kind: InjectionKind,
    pub start: usize,
    pub end: usize,
    pub channels: Vec<usize>,
    pub magnitude: f64,
}

/// Generator configuration. `t_len` is the length of *each* of the train and
/// test halves; the train half never receives injections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub t_len: usize,
    pub channels: usize,
    pub base_signal: BaseSignal,
    pub noise_std: f64,
    pub seed: u64,
    pub injections: Vec<InjectionSpec>,
}

/// A generated dataset: a clean training half, a test half with injections
/// applied, and labels marking exactly the injected windows.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthDataset {
    pub train: TimeSeries,
    pub test: TimeSeries,
    pub test_labels: LabelSeries,
}

/// Fraction of a point-injection window that carries actual spikes.
const SPIKE_FRACTION: f64 = 0.125;
/// Square-wave period used by contextual injections.
const CONTEXTUAL_PERIOD: f64 = 25.0;

fn validate_spec(spec: &SynthSpec) -> Result<()> {
    if spec.t_len == 0 {
        return Err(Error::Empty("synthetic series"));
    }
    if spec.channels == 0 {
        return Err(Error::invalid_param("channels", "must be at least 1"));
    }
    if !spec.noise_std.is_finite() || spec.noise_std < 0.0 {
        return Err(Error::invalid_param("noise_std", "must be non-negative"));
    }
    for inj in &spec.injections {
        if inj.start >= inj.end || inj.end > spec.t_len {
            return Err(Error::InvalidSegment {
                start: inj.start,
                end: inj.end,
                len: spec.t_len,
            });
        }
        if inj.channels.is_empty() {
            return Err(Error::invalid_param(
                "channels",
                "injection needs a channel",
            ));
        }
        if let Some(&ch) = inj.channels.iter().find(|&&ch| ch >= spec.channels) {
            return Err(Error::invalid_param(
                "channels",
                format!("channel {ch} out of range"),
            ));
        }
        if !inj.magnitude.is_finite() {
            return Err(Error::invalid_param("magnitude", "must be finite"));
        }
    }
    // Reject overlapping (or touching, which would merge labels) windows.
    let mut order: Vec<usize> = (0..spec.injections.len()).collect();
    order.sort_unstable_by_key(|&i| spec.injections[i].start);
    for pair in order.windows(2) {
        if spec.injections[pair[1]].start <= spec.injections[pair[0]].end {
            return Err(Error::OverlappingInjections { index: pair[1] });
        }
    }
    Ok(())
}

/// One stream of clean signal for a single channel, `2 * t_len` steps long
/// (train then test), drawn from the given RNG.
fn base_channel(
    rng: &mut ChaCha8Rng,
    base: BaseSignal,
    noise_std: f64,
    channel: usize,
    steps: usize,
) -> Vec<f64> {
    match base {
        BaseSignal::SineMix => {
            let stretch = 1.0 + 0.1 * channel as f64;
            let periods = [61.0 * stretch, 149.5 * stretch, 23.7 * stretch];
            let amplitudes = [1.0, 0.6, 0.3];
            let phases: [f64; 3] =
                std::array::from_fn(|_| rng.random::<f64>() * std::f64::consts::TAU);
            let noise = Normal::new(0.0, noise_std.max(f64::MIN_POSITIVE)).expect("validated");
            (0..steps)
                .map(|t| {
                    let mut v = 0.0;
                    for k in 0..3 {
                        v += amplitudes[k]
                            * (std::f64::consts::TAU * t as f64 / periods[k] + phases[k]).sin();
                    }
                    if noise_std > 0.0 {
                        v += noise.sample(rng);
                    }
                    v
                })
                .collect()
        }
        BaseSignal::RandomWalk => {
            let step = Normal::new(0.0, noise_std.max(f64::MIN_POSITIVE)).expect("validated");
            let mut level = 0.0;
            (0..steps)
                .map(|_| {
                    if noise_std > 0.0 {
                        level += step.sample(rng);
                    }
                    level
                })
                .collect()
        }
    }
}

fn channel_mean_std(train_column: &[f64]) -> (f64, f64) {
    let n = train_column.len() as f64;
    let mean = train_column.iter().sum::<f64>() / n;
    let var = train_column
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n;
    (mean, var.sqrt().max(f64::MIN_POSITIVE))
}

/// Generate a dataset. Deterministic per seed: the base signal and each
/// injection draw from their own fixed substream, so adding or editing one
/// injection never perturbs the rest of the data.
pub fn generate(spec: &SynthSpec) -> Result<SynthDataset> {
    validate_spec(spec)?;
    let t_len = spec.t_len;
    let total = 2 * t_len;

    let mut base_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    base_rng.set_stream(0);
    let columns: Vec<Vec<f64>> = (0..spec.channels)
        .map(|ch| base_channel(&mut base_rng, spec.base_signal, spec.noise_std, ch, total))
        .collect();

    let stats: Vec<(f64, f64)> = columns
        .iter()
        .map(|col| channel_mean_std(&col[..t_len]))
        .collect();

    let mut test_columns: Vec<Vec<f64>> = columns.iter().map(|col| col[t_len..].to_vec()).collect();

    for (index, inj) in spec.injections.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(1 + index as u64);
        let len = inj.end - inj.start;
        match inj.kind {
            InjectionKind::Point => {
                let mut spiked: Vec<usize> = (inj.start..inj.end)
                    .filter(|_| rng.random::<f64>() < SPIKE_FRACTION)
                    .collect();
                if spiked.is_empty() {
                    spiked.push(inj.start + rng.random_range(0..len));
                }
                for t in spiked {
                    for &ch in &inj.channels {
                        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        test_columns[ch][t] += sign * inj.magnitude * stats[ch].1;
                    }
                }
            }
            InjectionKind::Contextual => {
                for &ch in &inj.channels {
                    let (mean, std) = stats[ch];
                    let window = &mut test_columns[ch][inj.start..inj.end];
                    for (offset, value) in window.iter_mut().enumerate() {
                        let t = (inj.start + offset) as f64;
                        let wave = if (std::f64::consts::TAU * t / CONTEXTUAL_PERIOD).sin() >= 0.0 {
                            1.0
                        } else {
                            -1.0
                        };
                        *value = mean + inj.magnitude * std * wave;
                    }
                }
            }
            InjectionKind::Collective => {
                let mut accumulated = vec![0.0; inj.channels.len()];
                let step_std = |std: f64| inj.magnitude.abs() * std / (2.0 * (len as f64).sqrt());
                for (offset, t) in (inj.start..inj.end).enumerate() {
                    let ramp = (offset + 1) as f64 / len as f64;
                    for (slot, &ch) in inj.channels.iter().enumerate() {
                        let std = stats[ch].1;
                        let sd = step_std(std);
                        if sd > 0.0 {
                            let noise = Normal::new(0.0, sd).expect("positive std");
                            accumulated[slot] += noise.sample(&mut rng);
                        }
                        test_columns[ch][t] += inj.magnitude * std * ramp + accumulated[slot];
                    }
                }
            }
        }
    }

    let to_series = |cols: &[Vec<f64>]| -> Result<TimeSeries> {
        let mut flat = Vec::with_capacity(t_len * spec.channels);
        for t in 0..t_len {
            for col in cols {
                flat.push(col[t]);
            }
        }
        TimeSeries::from_rows(t_len, spec.channels, flat)
    };
    let train_columns: Vec<Vec<f64>> = columns.iter().map(|col| col[..t_len].to_vec()).collect();
    let train = to_series(&train_columns)?;
    let test = to_series(&test_columns)?;

    let mut label_bits = vec![0u8; t_len];
    for inj in &spec.injections {
        label_bits[inj.start..inj.end].fill(1);
    }
    let test_labels = LabelSeries::new(label_bits)?;

    Ok(SynthDataset {
        train,
        test,
        test_labels,
    })
}

/// Build a random [`SegmentLayout`] with `m` disjoint, non-touching segments
/// of near-equal length totaling `round(gamma * t_len)`. Gap sizes are drawn
/// uniformly over the valid compositions of the free space, and segment
/// lengths differ by at most one.
pub fn layout_from_stats(t_len: usize, gamma: f64, m: usize, seed: u64) -> Result<SegmentLayout> {
    if t_len == 0 {
        return Err(Error::Empty("layout domain"));
    }
    if m == 0 {
        return Err(Error::invalid_param("m", "must be at least 1"));
    }
    if !gamma.is_finite() || !(0.0 < gamma && gamma < 1.0) {
        return Err(Error::invalid_param("gamma", "must be in (0, 1)"));
    }
    let covered = (gamma * t_len as f64).round() as usize;
    let free = t_len.saturating_sub(covered);
    // Need m segments of length >= 1 and m-1 separating gaps of length >= 1.
    if covered < m || free < m - 1 {
        return Err(Error::InfeasibleLayout {
            segments: m,
            total: covered,
            len: t_len,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = covered / m;
    let remainder = covered % m;
    let mut lengths = vec![base + 1; remainder];
    lengths.extend(vec![base; m - remainder]);
    lengths.shuffle(&mut rng);

    // Stars and bars over the slack: cuts partition the non-mandatory free
    // space into m+1 extra gap widths.
    let slack = free - (m - 1);
    let mut cuts: Vec<usize> = (0..m).map(|_| rng.random_range(0..=slack)).collect();
    cuts.sort_unstable();
    let mut extras = Vec::with_capacity(m + 1);
    let mut previous = 0;
    for &c in &cuts {
        extras.push(c - previous);
        previous = c;
    }
    extras.push(slack - previous);

    let mut segments = Vec::with_capacity(m);
    let mut cursor = extras[0];
    for (i, &len) in lengths.iter().enumerate() {
        let start = cursor;
        segments.push(Segment::new(start, start + len, t_len)?);
        cursor = start + len;
        if i + 1 < m {
            cursor += 1 + extras[i + 1]; // mandatory separator plus slack
        }
    }
    SegmentLayout::new(SegmentSet::new(segments, t_len)?)
}
