use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape error: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("invalid segment: {0}")]
    InvalidSegment(String),

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("training error at epoch {epoch}: {reason}")]
    Training { epoch: usize, reason: String },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("alignment error: streams overlap by {overlap_fraction:.3} of the stroke span")]
    Alignment { overlap_fraction: f64 },

    #[error("timestamp {got} us does not advance past {prev} us")]
    NonMonotonic { prev: u64, got: u64 },

    #[error("benchmark error: {0}")]
    Benchmark(String),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error("{path}: line {line}: {reason}")]
    Parse {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Model-file parse failures.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic {0:02x?}, expected \"PWM1\"")]
    BadMagic([u8; 4]),
    #[error("unsupported format version {0}")]
    Version(u16),
    #[error("unknown dtype tag {0}")]
    DType(u8),
    #[error("stream truncated: needed {needed} more bytes at offset {offset}")]
    Truncated { offset: usize, needed: usize },
    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("{0} trailing bytes after model payload")]
    Trailing(usize),
    #[error("malformed header: {0}")]
    Header(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, reason: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            reason: reason.into(),
        }
    }
}
