use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A value supplied through `flag` failed to parse or validate.
    #[error("{flag}: {source}")]
    Input {
        flag: &'static str,
        source: grover4d::Error,
    },
    #[error("{0}")]
    Core(#[from] grover4d::Error),
    #[error("Io: {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("Usage: {0}")]
    Usage(String),
}

impl CliError {
    pub fn input(flag: &'static str) -> impl FnOnce(grover4d::Error) -> CliError {
        move |source| CliError::Input { flag, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
