use thiserror::Error;

/// Errors raised by the lattice, algebra and inequality operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("scalar field mismatch")]
    FieldMismatch,

    #[error("element has dimension zero")]
    EmptyElement,

    #[error("real-field element has a nonzero imaginary part at coordinate {0}")]
    ImaginaryInRealField(usize),

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("lattice order is only defined on real-field elements")]
    ComplexOrder,

    #[error("element is outside the positive cone (coordinate {0})")]
    NotPositive(usize),

    #[error("exponent must be a finite positive real, got {0}")]
    InvalidExponent(f64),

    #[error("root index must be at least 1")]
    InvalidRootIndex,

    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("invalid conjugate exponent vector: {0}")]
    InvalidExponents(String),

    #[error("expected {expected} operands, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("matrix {0} of the form is not Hermitian")]
    NotHermitian(usize),

    #[error("matrix {index} of the form is not positive semidefinite (min eigenvalue {min_eigenvalue})")]
    NotPositiveSemidefinite { index: usize, min_eigenvalue: f64 },

    #[error("matrix has a negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },

    #[error("malformed matrix: {0}")]
    MalformedMatrix(String),

    #[error("map is a lattice homomorphism; no strictness witness exists")]
    IsHomomorphism,

    #[error("invalid grid configuration: {0}")]
    InvalidGrid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
