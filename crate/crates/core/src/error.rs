use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("columns are linearly dependent (rank {rank} < {cols})")]
    DependentColumns { rank: usize, cols: usize },
    #[error("not a subdiagram: {0}")]
    NotSubdiagram(String),
    #[error("unknown object '{0}'")]
    UnknownObject(String),
    #[error("unknown arrow '{0}'")]
    UnknownArrow(String),
    #[error("ring mismatch: {0}")]
    Ring(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
