use std::path::PathBuf;

/// Errors raised by the authentication and recognition pipeline.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    /// Malformed or truncated PGM data.
    #[error("PGM decode error at byte {offset}: {reason}")]
    Decode { offset: usize, reason: String },

    /// A crop rectangle that does not fit inside the image.
    #[error("crop rectangle x0={x0} y0={y0} w={w} h={h} exceeds image {width}x{height}")]
    Bounds {
        x0: usize,
        y0: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    /// An argument outside the operation's domain.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// Affine coefficients with a zero determinant.
    #[error("affine transform is not invertible (determinant {0})")]
    NonInvertible(f64),

    /// Model file with an unknown `format_version`.
    #[error("unsupported model format version {found} (expected {expected})")]
    ModelVersion { found: u32, expected: u32 },

    /// Model or config file that failed to parse.
    #[error("corrupted {what}: {reason}")]
    Corrupt { what: &'static str, reason: String },

    #[error("gallery error: {0}")]
    Gallery(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
