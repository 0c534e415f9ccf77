use mwk_core::MwError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Domain(#[from] MwError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
