use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("target is not in the rational span of the columns")]
    NotInSpan,
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("element is not in the group: {0}")]
    NotInGroup(String),
    #[error("not a homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("pairing entry incompatible with generator orders at ({0}, {1})")]
    IncompatibleEntry(usize, usize),
    #[error("pairing is not perfect")]
    NotPerfect,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("map does not define a pairing: {0}")]
    NotAPairing(String),
    #[error("element not in the dual of the cokernel")]
    NotInDual,
    #[error("lift does not reduce to the given map")]
    NotALift,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("distribution is not balanced: {0}")]
    UnbalancedDistribution(String),
    #[error("could not factor {0}")]
    Unfactorable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
