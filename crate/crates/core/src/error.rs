use num_complex::Complex64;
use thiserror::Error;

use crate::semigroup::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tolerance (rel = {rel}, abs = {abs}); both must be finite and nonnegative")]
    InvalidTolerance { rel: f64, abs: f64 },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("matrix is not Hermitian: ‖G − G*‖ = {residual:e} exceeds {threshold:e}")]
    NonHermitian { residual: f64, threshold: f64 },

    #[error("range violation: Gu leaks {leak:e} outside range(G) (threshold {threshold:e})")]
    RangeViolation { leak: f64, threshold: f64 },

    #[error("vectors are not linearly independent: {0}")]
    RankDeficient(String),

    #[error("rescaling condition fails at index {index}: α·conj(β) = {product}")]
    RescaleViolation { index: usize, product: Complex64 },

    #[error("B·A* is not the identity on F: residual {residual:e} exceeds {threshold:e}")]
    Condition1Violation { residual: f64, threshold: f64 },

    #[error("A*F is not contained in F_max: distance {distance:e} exceeds {threshold:e}")]
    Condition2Violation { distance: f64, threshold: f64 },

    #[error("the framing space F is zero-dimensional")]
    ZeroF,

    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{atoms} atoms requested, at most {max} are supported")]
    TooManyAtoms { atoms: usize, max: usize },

    #[error("atom {atom} is not Hermitian: residual {residual:e}")]
    AtomNotHermitian { atom: usize, residual: f64 },

    #[error("atom {atom} is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    AtomNotPsd { atom: usize, min_eigenvalue: f64 },

    #[error("operator map is not positive definite: minimum Gram eigenvalue {min_eigenvalue:e}")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("Gram null space leaks under element {element}: residual {residual:e} exceeds {threshold:e}")]
    QuotientLeak {
        element: usize,
        residual: f64,
        threshold: f64,
    },

    #[error("POVM failed the positive-definiteness check (minimum eigenvalue {min_eigenvalue:e}); the input is badly conditioned")]
    PositivityBroken { min_eigenvalue: f64 },

    #[error("semigroup axioms violated ({} violations, first: {})", .0.len(), .0[0])]
    InvalidSemigroup(Vec<Violation>),
}
