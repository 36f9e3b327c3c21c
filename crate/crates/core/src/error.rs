use thiserror::Error;

/// Errors raised by the algorithmic core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("image dimensions must be nonzero (got {width}x{height})")]
    ZeroDimension { width: usize, height: usize },
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    UnsupportedChannels(usize),
    #[error("expected {expected} samples for the given dimensions, got {actual}")]
    DataLength { expected: usize, actual: usize },
    #[error("sample {value} at index {index} is outside [0, 1]")]
    SampleRange { index: usize, value: f64 },
    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    #[error("snakelet has zero total length")]
    DegenerateSnakelet,
    #[error("edge fragment too short to initialize a snakelet ({0} pixel)")]
    FragmentTooShort(usize),
    #[error("cannot place {requested} disjoint breaks: {reason}")]
    BreakPlacement {
        requested: usize,
        reason: &'static str,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: &'static str) -> Self {
        Error::InvalidParameter { name, reason }
    }
}
