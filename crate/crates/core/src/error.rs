use thiserror::Error;

/// Errors raised by the group, transform, mask and frame routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid operand: {0}")]
    InvalidOperand(String),
    #[error("invalid length {len}: expected a power of {p}")]
    InvalidLength { len: usize, p: u8 },
    #[error("invalid mask: {0}")]
    InvalidMask(String),
    #[error("infinite product does not converge: m(theta) = {0}")]
    NonconvergentProduct(String),
    #[error("cascade diverged after {iterations} iterations (L2 norm {norm:e})")]
    CascadeDivergence { iterations: usize, norm: f64 },
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("degenerate filter: {0}")]
    DegenerateFilter(String),
    #[error("hypotheses not met: {0}")]
    NotApplicable(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
