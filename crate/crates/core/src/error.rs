use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular Weierstrass model (discriminant is zero)")]
    Singular,

    #[error("model is not minimal at {prime}")]
    NotMinimal { prime: u64 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("eigenline extraction failed: {0}")]
    Eigenline(String),

    #[error("numerical check failed: {0}")]
    Numeric(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis(_) => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
