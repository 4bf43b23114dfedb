//! Crate-wide error type with the exit-code classes the CLI contract needs.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty window: lo {lo} must be < hi {hi}")]
    EmptyWindow { lo: u64, hi: u64 },

    #[error("index {n} outside window [{lo}, {hi})")]
    OutOfWindow { n: i128, lo: u64, hi: u64 },

    #[error("residue {residue} out of range for modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },

    #[error("modulus must be >= 1")]
    ZeroModulus,

    #[error("degenerate interval [{a}, {b}) (need 0 <= a < b <= 1)")]
    DegenerateInterval { a: f64, b: f64 },

    #[error("probability {0} outside (0, 1)")]
    ProbabilityRange(f64),

    #[error("density {0} outside [0, 1]")]
    DensityRange(f64),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("prime {0} exceeds the supported limit {1}")]
    PrimeTooLarge(u64, u64),

    #[error("coverage violation: {0}")]
    Coverage(String),

    #[error("polynomial family is not essentially distinct")]
    NotEssentiallyDistinct,

    #[error("degree precondition violated: {0}")]
    DegreePrecondition(String),

    #[error("vector norm {0} exceeds the required bound 1")]
    NormBound(f64),

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("byte length mismatch: expected {expected}, got {got}")]
    ByteLengthMismatch { expected: usize, got: usize },

    #[error("invalid {what}: {detail}")]
    InvalidInput { what: &'static str, detail: String },

    #[error("exact mode requires a rational density (got a float density)")]
    ExactNeedsRationalDensity,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit-code class: 3 for input errors, 4 for overflow/coverage.
    /// (0 = pass and 2 = threshold failure are decided by the caller.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Overflow(_)
            | Error::Coverage(_)
            | Error::OutOfWindow { .. }
            | Error::ByteLengthMismatch { .. } => 4,
            _ => 3,
        }
    }
}
