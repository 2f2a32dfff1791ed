use thiserror::Error;

/// Errors reported by the sequence, enumeration, codec and channel layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Two elements would land on the same position.
    #[error("overlapping placement at position {position} (indices {first} and {second})")]
    Overlap {
        position: usize,
        first: usize,
        second: usize,
    },

    /// A shift vector violating `s_l >= s_{l+1} + ... + s_m`.
    #[error("shift vector is not non-squashing at level {level}")]
    Squashing { level: usize },

    #[error("{what} out of range: {value} not in {range}")]
    OutOfRange {
        what: &'static str,
        value: String,
        range: String,
    },

    #[error("separation vector is infeasible: {0}")]
    Infeasible(String),

    #[error("reference power must be positive, got {0}")]
    NonPositiveReference(String),

    #[error("payload does not match configuration: {0}")]
    PayloadMismatch(String),

    #[error("malformed channel profile: {0}")]
    Profile(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(
    what: &'static str,
    value: impl ToString,
    range: impl ToString,
) -> Error {
    Error::OutOfRange {
        what,
        value: value.to_string(),
        range: range.to_string(),
    }
}
