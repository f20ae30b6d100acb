use thiserror::Error;

/// Errors raised by the geometry routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("vector length {0} is not even and at least 2")]
    OddLength(usize),
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("matrix shape {rows}x{cols} is invalid here: {reason}")]
    BadShape {
        rows: usize,
        cols: usize,
        reason: &'static str,
    },
    #[error("jet order {requested} unavailable (provider supports {max})")]
    JetOrder { requested: usize, max: usize },
    #[error("finite-difference step {step:e} underflows at derivative order {order}")]
    StepUnderflow { step: f64, order: usize },
    #[error("degenerate point ({x}, {y}): value {value:e} below threshold")]
    Degenerate { x: f64, y: f64, value: f64 },
    #[error("every grid point is degenerate")]
    AllDegenerate,
    #[error("harmonic sequence terminated at index {index} at ({x}, {y})")]
    SequenceTerminated { index: i32, x: f64, y: f64 },
    #[error("matrix is not in SU(2) (defect {defect:e})")]
    NotSpecialUnitary { defect: f64 },
    #[error("gauge field is not integrable: residual {residual:e} exceeds {threshold:e}")]
    NonIntegrable { residual: f64, threshold: f64 },
    #[error("loop holonomy defect {defect:e} exceeds {threshold:e}")]
    Holonomy { defect: f64, threshold: f64 },
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
    #[error("incompatible surface specification: {0}")]
    IncompatibleSpec(String),
    #[error("surface is not an exponential-family member: {0}")]
    NotExponential(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("provider failure: {0}")]
    Provider(String),
}

pub type Result<T> = std::result::Result<T, Error>;
