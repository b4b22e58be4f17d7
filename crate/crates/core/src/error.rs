use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A numeric parameter violated its documented constraint.
    #[error("invalid parameter: {0}")]
    Param(String),
    /// An operation was called on an object in a state that does not support it.
    #[error("invalid state: {0}")]
    State(String),
    /// Input data (maps, poses, scans) violated a precondition.
    #[error("invalid input: {0}")]
    Input(String),
    /// Two objects that must agree (grid revision and distance field, tree and
    /// frontier ids) do not.
    #[error("internal consistency: {0}")]
    Consistency(String),
    #[error("config {path}: field `{field}`: {msg}")]
    Config {
        path: PathBuf,
        field: String,
        msg: String,
    },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
