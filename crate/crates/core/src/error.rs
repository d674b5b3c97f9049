use thiserror::Error;

/// Errors raised by state construction, entanglement evaluation and surveys.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("mode {0} is not part of this ordering")]
    UnknownMode(String),
    #[error("orderings do not match: {0}")]
    OrderingMismatch(String),
    #[error("mode sets overlap: {0}")]
    OverlappingModes(String),
    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),
    #[error("cannot normalize the zero state")]
    ZeroState,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("spin projection {twice_sz}/2 is outside the field's range")]
    SpinOutOfRange { twice_sz: i8 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("branch {0} of the joint state vanishes")]
    DegenerateSpec(&'static str),
    #[error("density matrix has eigenvalue {0:e} below the validity threshold")]
    NegativeEigenvalue(f64),
    #[error("full enumeration of {modes}! orderings refused; use a Monte Carlo survey")]
    EnumerationRefused { modes: usize },
    #[error("report was built for field {report}, not {requested}")]
    FieldMismatch { report: String, requested: String },
    #[error("no examined ordering belongs to the physical class")]
    NoPhysicalClass,
    #[error("cannot parse mode label `{0}`")]
    BadLabel(String),
}

pub type Result<T, E = FockError> = std::result::Result<T, E>;
