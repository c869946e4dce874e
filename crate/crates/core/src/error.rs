use thiserror::Error;

/// Errors raised by the optimization library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cone error: {0}")]
    Cone(String),

    /// `A F(theta) > 0` is required by the adaptive multiplier domain.
    #[error("adaptive multiplier domain requires A F(theta) > 0, got {0:?}")]
    DomainViolation(Vec<f64>),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for aborts caused by numerics (NaN, domain violation) rather than
    /// bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonFinite(_) | Error::DomainViolation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension(format!("{what}: expected {expected}, got {got}")));
    }
    Ok(())
}
