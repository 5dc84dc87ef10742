use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The loop left the Birkhoff big cell (or the truncated Toeplitz system
    /// became too ill-conditioned to tell).
    #[error("Birkhoff factorization failed: {reason} (condition {condition:.3e}, residual {residual:.3e})")]
    BigCellFailure {
        reason: String,
        condition: f64,
        residual: f64,
    },

    #[error("frame is not regular: {0}")]
    RegularityFailure(String),

    #[error("frame is not weakly regular: {0}")]
    WeakRegularityFailure(String),

    #[error("hypothesis violated on t in [{t_start}, {t_end}]: {message}")]
    HypothesisViolation {
        message: String,
        t_start: f64,
        t_end: f64,
    },

    #[error("curve data is of mixed type: {0}")]
    MixedType(String),

    #[error("real form mismatch: {0}")]
    FormMismatch(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("frame not orthonormal (defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid curve data: {0}")]
    Curve(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn hypothesis(message: impl Into<String>, t_start: f64, t_end: f64) -> Self {
        Error::HypothesisViolation {
            message: message.into(),
            t_start,
            t_end,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
