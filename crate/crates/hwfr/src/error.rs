//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by grid construction, transforms, solvers, and pipelines.
#[derive(Debug, Error)]
pub enum Error {
    /// A 1D grid length that is not a power of two.
    #[error("grid length {0} is not a nonzero power of two")]
    NonDyadicLength(usize),

    /// Volume dimensions that are not each a power of two.
    #[error("volume dimensions ({0}, {1}, {2}) must each be a nonzero power of two")]
    NonDyadicDims(usize, usize, usize),

    /// A decomposition level outside `1..=max_level(dims)`.
    #[error("decomposition level {level} out of range 1..={max} for these dimensions")]
    LevelOutOfRange { level: usize, max: usize },

    /// A non-finite (NaN or infinite) value where finite data is required.
    #[error("non-finite value in {context} at index {index}")]
    NonFinite { context: &'static str, index: usize },

    /// Mismatched lengths or shapes between related inputs.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A negative penalty weight.
    #[error("penalty weight must be nonnegative, got {0}")]
    NegativePenalty(f64),

    /// Coordinate descent exhausted its sweep budget before the optimality
    /// certificate was met.
    #[error(
        "coordinate descent did not converge within {max_sweeps} sweeps \
         (optimality violation {violation:.3e} at penalty {lambda:.3e})"
    )]
    DidNotConverge {
        max_sweeps: usize,
        violation: f64,
        lambda: f64,
    },

    /// An invalid argument not covered by a more specific variant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Data degenerate for the requested operation (e.g. zero-variance
    /// responses where a signal-to-noise ratio must be applied).
    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// A failure inside one replicate of a resampling pipeline, tagged with
    /// the replicate index so the run can be reproduced in isolation.
    #[error("replicate {index} failed: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wraps an error with the index of the resampling replicate it occurred in.
    pub fn in_replicate(self, index: usize) -> Error {
        Error::Replicate {
            index,
            source: Box::new(self),
        }
    }
}

/// Returns an error if any value in `values` is NaN or infinite.
pub(crate) fn ensure_finite(values: &[f64], context: &'static str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { context, index }),
        None => Ok(()),
    }
}
