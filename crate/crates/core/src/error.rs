use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is outside its allowed domain.
    #[error("configuration error: {field}: {message}")]
    Config { field: String, message: String },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("parameter binding error: {0}")]
    ParamBinding(String),

    #[error("unsupported gate for the shift rule: {0}")]
    UnsupportedGate(String),

    /// An operation was called with state it cannot use (empty tape, empty archive).
    #[error("state error: {0}")]
    State(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("input error: {0}")]
    Input(String),

    /// Training produced a non-finite loss or gradient.
    #[error("training failed: {0}")]
    Training(String),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
