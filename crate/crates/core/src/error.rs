//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors surfaced by series construction, map iteration, the K estimator
/// and the file readers.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation received an empty value set.
    #[error("empty input: at least one value is required")]
    EmptyInput,

    /// A sample was NaN or infinite.
    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    /// The series is shorter than the operation requires.
    #[error("series too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },

    /// A map state or parameter fell outside its admissible range.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Requested frequency outside the open interval (0, 2*pi).
    #[error("invalid frequency c = {c}: must lie in (0, 2*pi)")]
    InvalidC { c: f64 },

    /// Frequency too close to 0 or 2*pi for the oscillation correction
    /// (1 - cos c below tolerance).
    #[error("resonant frequency c = {c}: 1 - cos(c) below tolerance")]
    ResonantC { c: f64 },

    /// Displacement profile is constant, so a correlation is undefined.
    #[error("zero variance: displacement profile is constant")]
    ZeroVariance,

    /// Every non-DC spectral magnitude is numerically zero.
    #[error("no valid frequency: spectrum has no non-zero magnitude off DC")]
    NoValidFrequency,

    /// No frequency grid point survived clamping and resonance filtering.
    #[error("empty frequency grid after clamping")]
    EmptyGrid,

    /// A configuration field violates its documented constraint.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A line of an input file could not be parsed as a number.
    #[error("parse error at line {line}")]
    ParseError { line: usize },

    /// A parsed value violates the record's constraints (e.g. a
    /// non-positive RR interval).
    #[error("invalid value at line {line}: {reason}")]
    ValueError { line: usize, reason: String },

    /// Underlying I/O failure while reading an input file.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
