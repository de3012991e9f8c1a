use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("config line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] g2glue_core::Error),
}

impl CliError {
    /// 2 for configuration and domain errors, 3 for i/o, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Parse { .. } => 2,
            CliError::Core(g2glue_core::Error::Domain(_) | g2glue_core::Error::InvalidDegree { .. }) => 2,
            CliError::Io(_) => 3,
            CliError::Core(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
