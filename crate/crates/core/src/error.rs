use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid split p = {p}, q = {q}: both blocks must be nonempty")]
    InvalidSplit { p: usize, q: usize },

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("invalid mapping: {0}")]
    InvalidMap(String),

    #[error("weight {index} is not in the cone: {detail}")]
    WeightNotInCone { index: usize, detail: String },

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("{count} halfspaces exceed the enumeration limit of {limit}")]
    EnumerationLimit { count: usize, limit: usize },

    #[error("degenerate constraint set: {0}")]
    Degenerate(String),

    #[error("hyperplane normal must have unit length, got norm {norm}")]
    NonUnitNormal { norm: f64 },

    #[error("hyperplane classification needs p > 1 and q > 1, got p = {p}, q = {q}")]
    ClassificationNotApplicable { p: usize, q: usize },

    #[error("generator list is empty")]
    EmptyGenerators,

    #[error("mapping produced a non-finite value at component {index}")]
    NonFinite { index: usize },

    #[error("sample {index} is not a member of Omega")]
    NotInOmega { index: usize },

    #[error("exact arithmetic: {0}")]
    Exact(String),
}

impl Error {
    pub(crate) fn dim(what: impl Into<String>, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            what: what.into(),
            expected,
            found,
        }
    }
}
