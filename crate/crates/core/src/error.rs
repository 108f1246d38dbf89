use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or mutually inconsistent arguments (bad prime, mixed models, zero input).
    #[error("argument error: {0}")]
    Argument(String),
    /// Well-formed input that lies outside the hypotheses of the requested rule.
    #[error("domain error: {0}")]
    Domain(String),
    /// A variety descriptor violates its structural invariants.
    #[error("descriptor error: {0}")]
    Descriptor(String),
    /// The requested computation exceeds the configured size limits.
    #[error("resource error: {0}")]
    Resource(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
