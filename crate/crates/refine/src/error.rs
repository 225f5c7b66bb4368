use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] refine_core::Error),
    #[error("{}: {source}", path.display())]
    File { path: PathBuf, source: Box<Error> },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// Process exit status: 1 usage, 2 I/O or malformed file, 3 domain, 4 numeric.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Usage(_) => 1,
            Error::Io(_) | Error::Parse { .. } | Error::Format(_) => 2,
            Error::Core(e) if e.is_numeric() => 4,
            Error::Core(_) => 3,
            Error::File { source, .. } => source.exit_code(),
        }
    }
}

/// Attaches a file path to errors raised while reading or writing it.
pub trait WithPath<T> {
    fn with_path(self, path: impl Into<PathBuf>) -> Result<T>;
}

impl<T, E: Into<Error>> WithPath<T> for std::result::Result<T, E> {
    fn with_path(self, path: impl Into<PathBuf>) -> Result<T> {
        self.map_err(|e| Error::File {
            path: path.into(),
            source: Box::new(e.into()),
        })
    }
}
