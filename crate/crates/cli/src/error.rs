use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// A malformed text file; `line` is 1-based.
    #[error("{}: line {line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{}: {msg}", path.display())]
    Pgm { path: PathBuf, msg: String },

    #[error("config {}: {msg}", path.display())]
    Config { path: PathBuf, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] dualfb_core::Error),
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
