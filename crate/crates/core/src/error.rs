use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("graph generation failed after {retries} attempts: some block lacks an incoming or outgoing edge")]
    GenerationFailed { retries: usize },
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    Indefinite(f64),
    #[error("matrix is not orthogonal (residual {0:e})")]
    NotOrthogonal(f64),
    #[error("matrix is not normal")]
    NotNormal,
    #[error("operator is not diagonalizable (basis condition {0:e})")]
    NotDiagonalizable(f64),
    #[error("spectral radius is zero")]
    ZeroSpectralRadius,
    #[error("eigenvalue {0} is not on the unit circle")]
    OffUnitCircle(String),
    #[error("graph has {n} nodes, exhaustive search is limited to {max}")]
    TooLarge { n: usize, max: usize },
    #[error("filter domain mismatch: expected {expected}, found {found}")]
    DomainMismatch { expected: &'static str, found: &'static str },
    #[error("imaginary residue {residue:e} exceeds {limit:e}")]
    ImaginaryResidue { residue: f64, limit: f64 },
    #[error("degeneracy groups differ between bases")]
    GroupStructureMismatch,
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
