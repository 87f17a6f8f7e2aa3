//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Add/sub of series whose offsets differ by a non-lattice amount.
    #[error("incompatible exponent lattices: offsets differ by {gap} which is not a multiple of 1/{lattice_den}")]
    IncompatibleLattice { gap: String, lattice_den: u64 },

    /// Inversion of a series whose leading coefficient vanishes.
    #[error("cannot invert series: leading coefficient is zero")]
    ZeroLeadingCoefficient,

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// TBA fixed-point iteration failed to reach the requested tolerance.
    #[error(
        "TBA solver did not converge after {iterations} iterations (last residual {residual})"
    )]
    NoConvergence { iterations: u64, residual: String },

    /// Coset label with l+m odd.
    #[error("coset label parity violation: l={l}, m={m} with l+m odd")]
    ParityViolation { l: u32, m: i64 },

    #[error("character label out of range: {0}")]
    LabelOutOfRange(String),

    /// The z-Laurent long division left a remainder; indicates a bug.
    #[error("two-variable series division is not exact at q-order {order}")]
    NonexactDivision { order: usize },

    /// A candidate series matched more than one target combination.
    #[error(
        "ambiguous match: series equals both {first} and {second}; increase the truncation order"
    )]
    AmbiguousMatch { first: String, second: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
