//! Ground-truth anomaly segments: contiguous runs of positive labels,
//! represented half-open as `[start, end)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::LabelSeries;

/// A single half-open anomalous interval `[start, end)` with `start < end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn new(start: usize, end: usize, total_length: usize) -> Result<Self> {
        if start >= end || end > total_length {
            return Err(Error::InvalidSegment {
                start,
                end,
                len: total_length,
            });
        }
        Ok(Self { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A validated set of disjoint, sorted, non-adjacent segments over a series of
/// `total_length` steps. Non-adjacency is what makes `to_labels` and
/// `from_labels` exact inverses: two touching segments would merge back into
/// one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentSet {
    segments: Vec<Segment>,
    total_length: usize,
}

impl SegmentSet {
    pub fn new(segments: Vec<Segment>, total_length: usize) -> Result<Self> {
        if total_length == 0 {
            return Err(Error::Empty("segment set domain"));
        }
        let mut prev_end: Option<usize> = None;
        for seg in &segments {
            if seg.start >= seg.end || seg.end > total_length {
                return Err(Error::InvalidSegment {
                    start: seg.start,
                    end: seg.end,
                    len: total_length,
                });
            }
            if let Some(pe) = prev_end {
                // `<=` also rejects adjacency (end == next start).
                if seg.start <= pe {
                    return Err(Error::MalformedSegmentSet { start: seg.start });
                }
            }
            prev_end = Some(seg.end);
        }
        Ok(Self {
            segments,
            total_length,
        })
    }

    /// Extract maximal runs of 1s from a label series.
    pub fn from_labels(labels: &LabelSeries) -> Self {
        let raw = labels.as_slice();
        let mut segments = Vec::new();
        let mut run_start: Option<usize> = None;
        for (i, &v) in raw.iter().enumerate() {
            match (run_start, v) {
                (None, 1) => run_start = Some(i),
                (Some(s), 0) => {
                    segments.push(Segment { start: s, end: i });
                    run_start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = run_start {
            segments.push(Segment {
                start: s,
                end: raw.len(),
            });
        }
        Self {
            segments,
            total_length: raw.len(),
        }
    }

    /// Paint the segments back onto a 0/1 label vector of `total_length`.
    pub fn to_labels(&self) -> LabelSeries {
        let mut labels = vec![0u8; self.total_length];
        for seg in &self.segments {
            for l in &mut labels[seg.start..seg.end] {
                *l = 1;
            }
        }
        // The domain is non-empty by construction, so this cannot fail.
        LabelSeries::new(labels).expect("segment set domain is non-empty")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_length(&self) -> usize {
        self.total_length
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    /// Total number of steps covered by any segment.
    pub fn covered(&self) -> usize {
        self.segments.iter().map(Segment::len).sum()
    }
}

/// Summary statistics of a labeled dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub total_length: usize,
    pub num_segments: usize,
    pub anomaly_rate: f64,
    pub mean_segment_length: f64,
    pub min_segment_length: Option<usize>,
    pub max_segment_length: Option<usize>,
    pub segment_lengths: Vec<usize>,
}

/// Compute summary statistics for a label series.
pub fn dataset_stats(labels: &LabelSeries) -> DatasetStats {
    let set = SegmentSet::from_labels(labels);
    let lengths: Vec<usize> = set.segments().iter().map(Segment::len).collect();
    let covered: usize = lengths.iter().sum();
    let n = set.num_segments();
    DatasetStats {
        total_length: labels.len(),
        num_segments: n,
        anomaly_rate: covered as f64 / labels.len() as f64,
        mean_segment_length: if n == 0 {
            0.0
        } else {
            covered as f64 / n as f64
        },
        min_segment_length: lengths.iter().copied().min(),
        max_segment_length: lengths.iter().copied().max(),
        segment_lengths: lengths,
    }
}
