use thiserror::Error;

use crate::qmatrix::Shape;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{shape} lattice needs at least {min} points, got {n}")]
    SizeTooSmall { shape: Shape, n: usize, min: usize },

    #[error("no non-degenerate {shape} size in {n_min}..={n_max}")]
    EmptySelection {
        shape: Shape,
        n_min: usize,
        n_max: usize,
    },

    #[error("invalid range: {n_min} > {n_max}")]
    InvalidRange { n_min: usize, n_max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coupling between H{from:?} and H{to:?} shares neither row nor column")]
    PatternViolation {
        from: (usize, usize),
        to: (usize, usize),
    },

    #[error("coupling between H{from:?} and H{to:?} joins subspaces of equal grading")]
    ChiralityViolation {
        from: (usize, usize),
        to: (usize, usize),
    },

    #[error("coupling m{from:?},{to:?} has no matching {partner} partner (mismatch {mismatch:e})")]
    SymmetryViolation {
        from: (usize, usize),
        to: (usize, usize),
        partner: &'static str,
        mismatch: f64,
    },

    #[error("coupling references H{0:?}, which is not a subspace of the triple")]
    UnknownSubspace((usize, usize)),

    #[error("commutator is not block diagonal over columns (off-block residual {residual:e})")]
    NotBlockDiagonal { residual: f64 },

    #[error("block at point {point} has vanishing derivatives")]
    DegenerateBlock { point: usize },

    #[error("point pair ({l}, {m}) has vanishing derivatives in both factors")]
    DegeneratePair { l: usize, m: usize },

    #[error("block at point {point} is a boundary block")]
    BoundaryBlock { point: usize },

    #[error("operation requires a circle, got {0}")]
    ShapeUnsupported(Shape),

    #[error("axiom check `{check}` failed with residual {residual:e}")]
    AxiomFailure { check: String, residual: f64 },

    #[error("{shape} size {n} has a degenerate intersection matrix")]
    DegenerateSize { shape: Shape, n: usize },

    #[error("operator is not self-adjoint (residual {residual:e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("spectrum has no nonzero eigenvalue")]
    AllZeroSpectrum,

    #[error("determinant does not fit in 64 bits")]
    Overflow,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
