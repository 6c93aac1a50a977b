use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("warp is not positive at t = {t} (phi = {phi})")]
    NonPositiveWarp { t: f64, phi: f64 },

    #[error("incomparable domains: candidate length {candidate} is shorter than reference length {reference}")]
    IncomparableDomains { candidate: f64, reference: f64 },

    #[error("numerical failure: {0}")]
    NonConvergence(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
