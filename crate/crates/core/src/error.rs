use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("level {0} exceeds the supported maximum of 62")]
    LevelOverflow(u32),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not a polynomial of degree <= {degree}: {detail}")]
    NotPolynomial { degree: i32, detail: String },
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),
    #[error("certification failed: {0}")]
    Certification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
