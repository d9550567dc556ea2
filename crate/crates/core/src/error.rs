use thiserror::Error;

/// Errors raised anywhere in the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square: {rows} rows for {len} entries")]
    NotSquare { rows: usize, len: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("generator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid state vector: {0}")]
    InvalidState(String),

    #[error("integration step must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("segment duration must be positive, got {0}")]
    NonPositiveDuration(f64),

    #[error("argument out of supported range: {0}")]
    OutOfRange(String),

    #[error("invalid pulse parameters: {0}")]
    InvalidPulse(String),

    #[error("broken loop: auxiliary state returns with deviation {deviation:.3e}")]
    BrokenLoop { deviation: f64 },

    #[error("operation not defined for scheme {0}")]
    UnsupportedScheme(String),

    #[error("off-resonant drive: nu = {nu:.6e} rad/s but Delta = {delta:.6e} rad/s")]
    OffResonant { nu: f64, delta: f64 },

    #[error("integration did not converge: {0}")]
    NonConvergence(String),

    #[error("fit rejected: {0}")]
    Fit(String),

    #[error("invalid sweep: {0}")]
    Sweep(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown figure id {id}; supported ids: {supported}")]
    UnknownFigure { id: u32, supported: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
