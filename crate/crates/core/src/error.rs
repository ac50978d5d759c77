use thiserror::Error;

use crate::groupoid::ValidationReport;

/// Errors raised by construction, measure and IO operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("`{0}` is not a unit")]
    NotAUnit(String),

    #[error("measures live on different base sets")]
    BaseMismatch,

    #[error("map is not measure class preserving (witness `{witness}`)")]
    NotMeasureClassPreserving { witness: String },

    #[error("fibred product map leaves the base product at {0}")]
    IncompatibleFibredProduct(String),

    #[error("measure is not quasi-invariant (witness `{witness}`)")]
    NotQuasiInvariant { witness: String },

    #[error("invalid cospan:\n{0}")]
    InvalidCospan(ValidationReport),

    #[error("not a disintegration: {0}")]
    NotADisintegration(String),

    #[error("image mismatch for cover block `{0}`")]
    ImageMismatch(String),

    #[error("space must be nonempty")]
    EmptySpace,

    #[error("canonical map precondition failed: {0}")]
    PrecomputedConditionFailed(String),

    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),

    #[error("random generation exhausted after {0} attempts")]
    GenerationExhausted(usize),

    #[error("parse error at {locus}: {message}")]
    ParseError { locus: String, message: String },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u64),

    #[error("dangling reference at {locus}: `{id}`")]
    DanglingReference { locus: String, id: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
