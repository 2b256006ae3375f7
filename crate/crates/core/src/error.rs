//! Error type shared across the crate.

use std::path::PathBuf;

/// Errors produced by series construction, protocol evaluation, and file I/O.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty {0}")]
    Empty(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("label at index {index} is {value}, expected 0 or 1")]
    InvalidLabel { index: usize, value: f64 },

    #[error("segment [{start}, {end}) is invalid for series length {len}")]
    InvalidSegment {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("segments must be sorted, disjoint and non-adjacent (offending start: {start})")]
    MalformedSegmentSet { start: usize },

    #[error("window size {tau} out of range for series length {len}")]
    WindowOutOfRange { tau: usize, len: usize },

    #[error("channel count mismatch: {left} vs {right}")]
    ChannelMismatch { left: usize, right: usize },

    #[error("empty threshold candidate set")]
    EmptyCandidates,

    #[error("empty grid")]
    EmptyGrid,

    #[error("labels contain a single class; need at least one 0 and one 1")]
    SingleClass,

    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("cannot place {segments} disjoint segments totaling {total} points in length {len}")]
    InfeasibleLayout {
        segments: usize,
        total: usize,
        len: usize,
    },

    #[error("injection segments overlap at index {index}")]
    OverlappingInjections { index: usize },

    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Convenience constructor for [`Error::InvalidParam`].
    pub fn invalid_param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
