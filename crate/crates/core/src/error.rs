use alloc::string::String;

/// Errors raised by the range, sampling and semi-Hilbert routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("operator tuple is empty")]
    EmptyTuple,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("|q| = {0} exceeds 1")]
    InvalidQ(f64),
    #[error("constraint `{constraint}` violated (residual {residual:e})")]
    ConstraintViolation {
        constraint: &'static str,
        residual: f64,
    },
    #[error("infeasible constraint set: {0}")]
    Infeasible(&'static str),
    #[error("tuple does not commute (max commutator norm {residual:e})")]
    NonCommuting { residual: f64 },
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is indefinite (eigenvalue {eigenvalue:e})")]
    Indefinite { eigenvalue: f64 },
    #[error("operator has no A-adjoint (Douglas residual {residual:e})")]
    NotAdjointable { residual: f64 },
    #[error("operator maps N(A) outside N(A); its q-A-range is the whole plane")]
    KernelEscape,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
