use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("projection direction must be nonzero")]
    ZeroDirection,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exhausted: {what} exceeds {limit}")]
    Budget { what: &'static str, limit: u64 },

    #[error("configuration does not span its ambient space")]
    DeficientSpan,

    #[error("no generic point found after {0} attempts")]
    Genericity(u32),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit status for the CLI: 2 config error, 3 budget exhaustion,
    /// 1 everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget { .. } => 3,
            Error::InvalidInput(_) | Error::Io(_) => 2,
            _ => 1,
        }
    }
}
