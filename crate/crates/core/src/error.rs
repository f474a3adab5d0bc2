use crate::grading::Degree;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown spectrum tag `{0}`")]
    UnknownTag(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("answer at {0} changed when the truncation caps were enlarged")]
    StabilizationFailure(Degree),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("mismatch at {degree}: {detail}")]
    Mismatch { degree: Degree, detail: String },
    #[error("module on diagonal {d}, column {column} matches no catalogue entry")]
    UnclassifiedModule { d: i64, column: i64 },
    #[error("extension problem not determined at {0}")]
    UnknownExtension(Degree),
    #[error("inconsistent spectral sequence data: {0}")]
    InconsistentSsData(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("arithmetic overflow in exact linear algebra")]
    Overflow,
}

pub type Result<T> = std::result::Result<T, Error>;
