use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),

    #[error("unsupported PGM maxval {0} (only 255 is accepted)")]
    MaxvalUnsupported(u32),

    #[error("truncated PGM data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("image dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("pixel ({row}, {col}) has no full neighborhood in a {width}x{height} image")]
    OutOfBounds {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bit stream exhausted at position {0}")]
    BitStreamExhausted(usize),

    #[error("linear solve failed: non-positive pivot {pivot:e} at row {row}")]
    SolveFailed { row: usize, pivot: f64 },

    #[error("capacity unreachable: need {target} bits, at most {available} embeddable")]
    CapacityUnreachable { target: usize, available: usize },

    #[error("image too small: {0}")]
    ImageTooSmall(String),

    #[error("threshold delta {0} does not fit the side-information field")]
    ThresholdDeltaOverflow(i32),

    #[error("side-information field {field} cannot hold {value}")]
    SideInfoOverflow { field: &'static str, value: i64 },

    #[error("malformed stego image: {0}")]
    MalformedStego(String),
}

impl Error {
    /// Short stable name, used in sweep reports for failed rows.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Io(_) => "Io",
            Error::MalformedHeader(_) => "MalformedHeader",
            Error::MaxvalUnsupported(_) => "MaxvalUnsupported",
            Error::Truncated { .. } => "Truncated",
            Error::DimensionMismatch(..) => "DimensionMismatch",
            Error::OutOfBounds { .. } => "OutOfBounds",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::BitStreamExhausted(_) => "BitStreamExhausted",
            Error::SolveFailed { .. } => "SolveFailed",
            Error::CapacityUnreachable { .. } => "CapacityUnreachable",
            Error::ImageTooSmall(_) => "ImageTooSmall",
            Error::ThresholdDeltaOverflow(_) => "ThresholdDeltaOverflow",
            Error::SideInfoOverflow { .. } => "SideInfoOverflow",
            Error::MalformedStego(_) => "MalformedStego",
        }
    }
}
