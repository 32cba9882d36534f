use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config file or input data.
    #[error("{0}")]
    Config(String),

    /// Something failed after the inputs were accepted.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    pub fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<qmllab::Error> for CliError {
    fn from(e: qmllab::Error) -> Self {
        use qmllab::Error as E;
        match e {
            E::Config { .. } | E::Validation(_) | E::Parse { .. } | E::Io { .. } | E::Input(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}
