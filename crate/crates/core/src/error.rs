use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("hash index {index} out of range for a codebook with {rows} rows")]
    IndexOutOfRange { index: u64, rows: u64 },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    /// No transmit energy reaches the given direction, so the sensing bound is infinite.
    #[error("zero beam energy toward {theta_deg} deg (unbounded sensing error)")]
    ZeroBeamEnergy { theta_deg: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("found {found} spectral peaks but {wanted} targets were requested")]
    PeakShortfall { found: usize, wanted: usize },

    #[error("inconsistent experiment result: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
