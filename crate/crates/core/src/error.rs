use thiserror::Error;

/// Errors raised by the tensor, transform and solver routines.
///
/// Variants split into two families: validation failures (bad shapes,
/// ranks, inputs that violate a documented precondition) and numerical
/// guards (size limits, singular systems, solver non-convergence). The
/// CLI maps them to distinct exit codes via [`Error::is_numerical`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("rank underflow: operation needs rank >= {needed}, got {got}")]
    RankUnderflow { needed: usize, got: usize },
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("zero direction vector")]
    ZeroDirection,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("no convergence after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Size guards, singular systems and solver failures.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SizeGuard(_) | Error::Singular(_) | Error::NoConvergence { .. }
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimMismatch { expected, got })
    }
}
