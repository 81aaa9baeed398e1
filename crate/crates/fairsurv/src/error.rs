use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("divergence at epoch {epoch}: {component} component is not finite")]
    Divergence { epoch: usize, component: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code: 2 validation/config, 3 I/O, 4 numeric divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_)
            | Error::Parse(_)
            | Error::Validation(_)
            | Error::Shape(_)
            | Error::Json(_)
            | Error::Csv(_) => 2,
            Error::Io(_) => 3,
            Error::Numeric(_) | Error::Divergence { .. } => 4,
        }
    }
}
