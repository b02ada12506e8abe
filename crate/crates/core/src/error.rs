use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed file contents (bad header, truncated payload, ...).
    #[error("malformed image: {0}")]
    Format(String),

    #[error("unsupported format: {0}")]
    Unsupported(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("curve file: {0}")]
    CurveFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
