use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KmError {
    #[error("gaussian scales differ: {0}")]
    ScaleMismatch(String),
    #[error("unsupported gaussian scale: {0}")]
    UnsupportedScale(String),
    #[error("function is not integrable: {0}")]
    NonIntegrable(String),
    #[error("substitution by zero is not invertible")]
    ZeroScale,
    #[error("matrix is not unitary")]
    NotUnitary,
    #[error("resource limit exceeded: needs {needed} monomial operations, budget is {budget}")]
    ResourceLimit { needed: u128, budget: u128 },
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("group element is not of the form n(b)m(a)")]
    DecompositionUnsupported,
    #[error("trace form is singular")]
    SingularTraceForm,
    #[error("lattice is not positive definite")]
    IndefiniteLattice,
    #[error("enumeration cap exceeded: needs {needed}, bound is {bound}")]
    CapExceeded { needed: String, bound: String },
    #[error("group action has fixed points")]
    NonFreeAction,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, KmError>;
