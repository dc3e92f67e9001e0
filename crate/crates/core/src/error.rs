use thiserror::Error;

use crate::mass::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid mass function: {0}")]
    InvalidMass(ValidationReport),

    #[error("total conflict between sources (conflict degree {0})")]
    TotalConflict(f64),

    #[error("redistribution function violates its constraints: {0}")]
    InvalidRedistribution(String),

    #[error("solver did not converge after {iterations} iterations")]
    NotConverged { iterations: usize },

    #[error("invalid sharpening: {0}")]
    InvalidSharpening(String),

    #[error("invalid proposition family: {0}")]
    InvalidFamily(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("nested modality at {position}: modalities apply to classical propositions only")]
    NestedModality { position: usize },

    #[error("invalid source groups: {0}")]
    InvalidSources(String),

    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("document error: {0}")]
    Document(String),
}
